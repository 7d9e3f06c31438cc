//! Built-in benchmark catalog and convergence-table generation.
//!
//! Eight series with known large-variable limits. Coefficients come
//! either from closed-form generators (gamma-function expressions) or
//! from literal values, normalized at ingestion so the stored series
//! always starts with an implied 1; dimensional prefactors live in
//! (amplitude, exponent). Literal coefficients are capped at the orders
//! actually published, so every number in a table traces back to a
//! stated value.

use crate::approximant::{
    assemble, asymptotic, percentage_errors, AsymptoticForm, FactorApproximant,
};
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::precision::{Precision, Real};
use crate::series::{log_derivatives, PowerSeries};
use crate::solver::{solve_even, solve_odd};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CaseKind {
    PartitionFunction,
    AnharmonicOscillator,
    MittagLeffler,
    SchwingerLattice,
    SchwingerContinuum,
    Harmonium,
    CuspDimension,
    PolymerChain,
}

/// A named benchmark: coefficient source, prefactor, substitution power
/// and the exact large-variable limit.
#[derive(Clone, Debug)]
pub struct CaseDefinition {
    kind: CaseKind,
}

/// Orders the literal coefficient lists support; generator-backed cases
/// are capped here as well to keep table requests bounded.
const GENERATOR_MAX_ORDER: usize = 32;

// Ground-state energy corrections of the quartic anharmonic oscillator,
// E = 1/2 + Σ a_n g^n.
const ANHARMONIC_RAW: [&str; 10] = [
    "0.75",
    "-2.625",
    "20.8125",
    "-241.2890625",
    "3580.98046875",
    "-63982.8134766",
    "1329733.72705",
    "-31448214.6928",
    "833541603.263",
    "-24478940702.8",
];

// Vector-boson gap of the lattice Schwinger model in z = 1/(ga)^4.
const SCHWINGER_LATTICE_RAW: [&str; 10] = [
    "2",
    "-10",
    "78.66667",
    "-7.362222e2",
    "7.572929e3",
    "-8.273669e4",
    "9.428034e5",
    "-1.108358e7",
    "1.334636e8",
    "-1.637996e9",
];

// Polymer-chain expansion factor, α(g) = 1 + Σ a_n g^n.
// a_1 = 4/3 exactly; built separately so it stays exact at any precision.
const POLYMER_RAW_TAIL: [&str; 5] = [
    "-2.075385396",
    "6.296879676",
    "-25.05725072",
    "116.134785",
    "-594.71663",
];

impl CaseDefinition {
    pub fn name(&self) -> &'static str {
        match self.kind {
            CaseKind::PartitionFunction => "partition_function",
            CaseKind::AnharmonicOscillator => "anharmonic_oscillator",
            CaseKind::MittagLeffler => "mittag_leffler",
            CaseKind::SchwingerLattice => "schwinger_lattice",
            CaseKind::SchwingerContinuum => "schwinger_continuum",
            CaseKind::Harmonium => "harmonium",
            CaseKind::CuspDimension => "cusp_dimension",
            CaseKind::PolymerChain => "polymer_chain",
        }
    }

    pub fn description(&self) -> &'static str {
        match self.kind {
            CaseKind::PartitionFunction => {
                "partition function of the zero-dimensional quartic oscillator, expanded in the coupling g"
            }
            CaseKind::AnharmonicOscillator => {
                "ground-state energy of the one-dimensional quartic anharmonic oscillator"
            }
            CaseKind::MittagLeffler => "Mittag-Leffler function exp(x^2) erfc(x)",
            CaseKind::SchwingerLattice => {
                "vector-boson gap of the lattice Schwinger model in z = 1/(ga)^4"
            }
            CaseKind::SchwingerContinuum => {
                "continuum-limit Schwinger-model ground-state energy in x = m/g"
            }
            CaseKind::Harmonium => "ground-state energy of the two-electron harmonium atom in ω",
            CaseKind::CuspDimension => {
                "planar cusp anomalous dimension of a lightlike Wilson loop in the coupling g"
            }
            CaseKind::PolymerChain => "expansion factor of a polymer chain in the coupling g",
        }
    }

    pub fn max_order(&self) -> usize {
        match self.kind {
            CaseKind::PartitionFunction | CaseKind::MittagLeffler => GENERATOR_MAX_ORDER,
            CaseKind::AnharmonicOscillator | CaseKind::SchwingerLattice => 10,
            CaseKind::SchwingerContinuum | CaseKind::Harmonium | CaseKind::CuspDimension => 2,
            CaseKind::PolymerChain => 6,
        }
    }

    /// Prefactor amplitude A of f(x) = A x^α (1 + ...).
    pub fn amplitude(&self, prec: &Precision) -> Real {
        match self.kind {
            CaseKind::AnharmonicOscillator => Real::from_ratio(1, 2, prec),
            CaseKind::SchwingerContinuum => Real::parse("0.5642", prec).expect("literal"),
            CaseKind::Harmonium => {
                // 3 / 2^(4/3)
                let two = Real::from_i64(2, prec);
                &Real::from_i64(3, prec) / &two.pow(&Real::from_ratio(4, 3, prec))
            }
            CaseKind::CuspDimension => Real::from_i64(4, prec),
            _ => Real::one(prec),
        }
    }

    /// Prefactor exponent α in the physical variable.
    pub fn exponent(&self, prec: &Precision) -> Real {
        match self.kind {
            CaseKind::Harmonium => Real::from_ratio(2, 3, prec),
            CaseKind::CuspDimension => Real::from_i64(2, prec),
            _ => Real::zero(prec),
        }
    }

    /// Substitution power p: the series runs in t = x^p.
    pub fn substitution_power(&self, prec: &Precision) -> Real {
        match self.kind {
            CaseKind::Harmonium => Real::from_ratio(1, 3, prec),
            CaseKind::CuspDimension => Real::from_i64(2, prec),
            _ => Real::one(prec),
        }
    }

    /// Exact large-variable limit B x^γ.
    pub fn exact_limit(&self, prec: &Precision) -> Option<AsymptoticForm> {
        let (b, g): (Real, Real) = match self.kind {
            CaseKind::PartitionFunction => (
                Real::parse("1.022765", prec).expect("literal"),
                Real::from_ratio(-1, 4, prec),
            ),
            CaseKind::AnharmonicOscillator => (
                Real::parse("0.667986", prec).expect("literal"),
                Real::from_ratio(1, 3, prec),
            ),
            CaseKind::MittagLeffler => (Real::pi(prec).sqrt().recip(), Real::from_i64(-1, prec)),
            CaseKind::SchwingerLattice => (
                Real::parse("1.1284", prec).expect("literal"),
                Real::from_ratio(1, 4, prec),
            ),
            CaseKind::SchwingerContinuum => (
                Real::parse("0.6417", prec).expect("literal"),
                Real::from_ratio(-1, 3, prec),
            ),
            CaseKind::Harmonium => (Real::from_i64(3, prec), Real::one(prec)),
            CaseKind::CuspDimension => (Real::from_i64(2, prec), Real::one(prec)),
            CaseKind::PolymerChain => (
                Real::parse("1.531", prec).expect("literal"),
                Real::parse("0.3544", prec).expect("literal"),
            ),
        };
        Some(AsymptoticForm {
            amplitude: b,
            exponent: g,
        })
    }

    /// First k normalized coefficients at working precision.
    pub fn coefficients(&self, k: usize, prec: &Precision) -> Result<Vec<Real>> {
        if k == 0 {
            return Err(Error::InvalidInput("order must be at least 1".into()));
        }
        if k > self.max_order() {
            return Err(Error::OrderTooLarge {
                requested: k,
                available: self.max_order(),
            });
        }
        let raw: Vec<Real> = match self.kind {
            CaseKind::PartitionFunction => {
                // a_n = (-1)^n Γ(2n + 1/2) / (√π n!)
                let sqrt_pi = Real::pi(prec).sqrt();
                let half = Real::from_ratio(1, 2, prec);
                let mut fact = Real::one(prec);
                (1..=k)
                    .map(|n| {
                        fact = &fact * &Real::from_i64(n as i64, prec);
                        let g = gamma(&(&Real::from_i64(2 * n as i64, prec) + &half), prec);
                        let v = &g / &(&sqrt_pi * &fact);
                        if n % 2 == 1 {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            }
            CaseKind::MittagLeffler => {
                // a_n = (-1)^n / Γ(n/2 + 1)
                (1..=k)
                    .map(|n| {
                        let x = &Real::from_ratio(n as i64, 2, prec) + &Real::one(prec);
                        let v = gamma(&x, prec).recip();
                        if n % 2 == 1 {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            }
            CaseKind::AnharmonicOscillator => parse_literals(&ANHARMONIC_RAW[..k], prec)?,
            CaseKind::SchwingerLattice => parse_literals(&SCHWINGER_LATTICE_RAW[..k], prec)?,
            CaseKind::SchwingerContinuum => {
                let raw = ["-0.219", "0.1907"];
                parse_literals(&raw[..k], prec)?
            }
            CaseKind::Harmonium => {
                // (3+√3)/2 and 7/(36·2^(2/3))
                let two = Real::from_i64(2, prec);
                let t1 = &(&Real::from_i64(3, prec) + &Real::from_i64(3, prec).sqrt()) / &two;
                let t2 = &Real::from_i64(7, prec)
                    / &(&Real::from_i64(36, prec) * &two.pow(&Real::from_ratio(2, 3, prec)));
                [t1, t2][..k].to_vec()
            }
            CaseKind::CuspDimension => {
                // -(4π²/3) and 44π⁴/45, in t = g²
                let pi2 = Real::pi(prec).powi(2);
                let t1 = -&(&pi2 * &Real::from_ratio(4, 3, prec));
                let t2 = &pi2.powi(2) * &Real::from_ratio(44, 45, prec);
                [t1, t2][..k].to_vec()
            }
            CaseKind::PolymerChain => {
                let mut v = vec![Real::from_ratio(4, 3, prec)];
                v.extend(parse_literals(&POLYMER_RAW_TAIL[..k - 1], prec)?);
                v
            }
        };
        // Normalize by the prefactor amplitude so a_0 = 1 as stored.
        let amp = self.amplitude(prec);
        Ok(raw.into_iter().map(|c| &c / &amp).collect())
    }

    /// The series truncated at order k.
    pub fn series(&self, k: usize, prec: &Precision) -> Result<PowerSeries> {
        PowerSeries::new(
            self.amplitude(prec),
            self.exponent(prec),
            self.substitution_power(prec),
            self.coefficients(k, prec)?,
        )
    }
}

fn parse_literals(raw: &[&str], prec: &Precision) -> Result<Vec<Real>> {
    raw.iter().map(|s| Real::parse(s, prec)).collect()
}

/// The full catalog, in presentation order.
pub fn builtin_cases() -> Vec<CaseDefinition> {
    use CaseKind::*;
    [
        PartitionFunction,
        AnharmonicOscillator,
        MittagLeffler,
        SchwingerLattice,
        SchwingerContinuum,
        Harmonium,
        CuspDimension,
        PolymerChain,
    ]
    .into_iter()
    .map(|kind| CaseDefinition { kind })
    .collect()
}

/// Case lookup by name.
pub fn find_case(name: &str) -> Result<CaseDefinition> {
    builtin_cases()
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownCase(name.to_string()))
}

/// Full pipeline for one series at order k: moments, parameter solve
/// (even orders take the unique Prony route, odd orders the A_1 = 1
/// closure), assembly and large-variable limit.
pub fn extrapolate(
    series: &PowerSeries,
    k: usize,
    prec: &Precision,
) -> Result<(FactorApproximant, AsymptoticForm)> {
    let d = log_derivatives(series, k)?;
    let params = if k.is_multiple_of(2) {
        solve_even(&d, prec)?
    } else {
        solve_odd(&d, prec)?
    };
    let approx = assemble(series, &params);
    let asym = asymptotic(&approx, prec)?;
    Ok((approx, asym))
}

/// One convergence-table row.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub order: usize,
    pub outcome: RowOutcome,
}

#[derive(Clone, Debug)]
pub enum RowOutcome {
    Solved(SolvedRow),
    Failed { reason: String },
}

/// B_k, γ_k and their percentage errors (present when the exact limit
/// is known).
#[derive(Clone, Debug)]
pub struct SolvedRow {
    pub amplitude: Real,
    pub exponent: Real,
    pub amplitude_error_percent: Option<Real>,
    pub exponent_error_percent: Option<Real>,
}

/// Convergence table over increasing even orders.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub case_name: String,
    pub rows: Vec<TableRow>,
}

fn table_row(
    series: Result<PowerSeries>,
    exact: Option<&AsymptoticForm>,
    k: usize,
    prec: &Precision,
) -> TableRow {
    let outcome = series
        .and_then(|s| extrapolate(&s, k, prec))
        .and_then(|(_, asym)| {
            let errs = match exact {
                Some(e) => {
                    let r = percentage_errors(&asym, e)?;
                    (
                        Some(r.amplitude_error_percent),
                        Some(r.exponent_error_percent),
                    )
                }
                None => (None, None),
            };
            Ok(SolvedRow {
                amplitude: asym.amplitude,
                exponent: asym.exponent,
                amplitude_error_percent: errs.0,
                exponent_error_percent: errs.1,
            })
        });
    TableRow {
        order: k,
        outcome: match outcome {
            Ok(row) => RowOutcome::Solved(row),
            Err(e) => RowOutcome::Failed {
                reason: e.to_string(),
            },
        },
    }
}

fn validate_orders(case: &CaseDefinition, orders: &[usize]) -> Result<()> {
    for &k in orders {
        if k == 0 || k % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "table orders must be positive and even, got {k}"
            )));
        }
        if k > case.max_order() {
            return Err(Error::OrderTooLarge {
                requested: k,
                available: case.max_order(),
            });
        }
    }
    Ok(())
}

/// Runs the pipeline for every requested (even) order. A solver failure
/// at one order flags that row; it does not abort the table. Rows are
/// computed independently (in parallel with the `parallel` feature) and
/// reported in ascending order.
pub fn convergence_table(
    case: &CaseDefinition,
    orders: &[usize],
    prec: &Precision,
) -> Result<ConvergenceTable> {
    validate_orders(case, orders)?;
    let mut sorted: Vec<usize> = orders.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let exact = case.exact_limit(prec);
    let rows = crate::par::pmap(sorted, |k| {
        table_row(case.series(k, prec), exact.as_ref(), k, prec)
    });
    Ok(ConvergenceTable {
        case_name: case.name().to_string(),
        rows,
    })
}

/// Sequential twin of [`convergence_table`] (benchmark baseline).
pub fn convergence_table_seq(
    case: &CaseDefinition,
    orders: &[usize],
    prec: &Precision,
) -> Result<ConvergenceTable> {
    validate_orders(case, orders)?;
    let mut sorted: Vec<usize> = orders.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let exact = case.exact_limit(prec);
    let rows = sorted
        .into_iter()
        .map(|k| table_row(case.series(k, prec), exact.as_ref(), k, prec))
        .collect();
    Ok(ConvergenceTable {
        case_name: case.name().to_string(),
        rows,
    })
}
