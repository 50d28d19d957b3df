//! Upper bounds on the relations an honest-but-curious provider can derive
//! from the evaluation results of a whole run.

use serde::Serialize;

use super::{quantile_sizes, ObfuscationMethod};
use crate::error::{invalid, Result};

pub const NO_DUPLICATES_ASSUMPTION: &str = "assumes no duplicate solutions are generated";

/// Counts of derivable equations and inequations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeakageEstimate {
    pub equations: u128,
    /// Inequations between individuals of the same population.
    pub within_population_inequations: u128,
    /// Inequations between a population's best individual and individuals
    /// of populations with a smaller revealed maximum.
    pub cross_population_inequations: u128,
    /// `false` when no closed form exists (buckets, threshold); counts are then zero.
    pub closed_form: bool,
    /// Set when quantile sizes are unequal and the count is not the textbook form.
    pub approximate: bool,
    pub assumption: &'static str,
}

impl LeakageEstimate {
    pub fn inequations(&self) -> u128 {
        self.within_population_inequations + self.cross_population_inequations
    }
}

fn choose2(n: u128) -> u128 {
    n * n.saturating_sub(1) / 2
}

/// Closed-form leakage bounds after `iterations` evaluated populations of
/// `pop_size` individuals each.
pub fn leakage_estimate(iterations: u64, pop_size: u64, method: &ObfuscationMethod) -> Result<LeakageEstimate> {
    if iterations == 0 || pop_size == 0 {
        return Err(invalid("iterations and population size must be positive"));
    }
    let (it, pop) = (iterations as u128, pop_size as u128);
    let mut est = LeakageEstimate {
        equations: 0,
        within_population_inequations: 0,
        cross_population_inequations: 0,
        closed_form: true,
        approximate: false,
        assumption: NO_DUPLICATES_ASSUMPTION,
    };
    match *method {
        ObfuscationMethod::None => est.equations = choose2(it * pop),
        ObfuscationMethod::Order => {
            est.equations = choose2(it);
            est.within_population_inequations = choose2(pop) * it;
            // Σ_{i=1}^{it} (pop − 1)·(it − i)
            est.cross_population_inequations = (pop - 1) * choose2(it);
        }
        ObfuscationMethod::OrderQuantiles(k) => {
            if k == 0 || k as u128 > pop {
                return Err(invalid(format!("quantile count {k} must lie in 1..={pop}")));
            }
            est.approximate = pop % k as u128 != 0;
            let mut worse = pop;
            let mut per_population = 0u128;
            for size in quantile_sizes(pop_size as usize, k) {
                worse -= size as u128;
                per_population += size as u128 * worse;
            }
            est.within_population_inequations = per_population * it;
        }
        ObfuscationMethod::TopIndividuals(k) => {
            let k = k as u128;
            if k == 0 || k > pop {
                return Err(invalid(format!("top count {k} must lie in 1..={pop}")));
            }
            est.within_population_inequations = k * (pop - k) * it;
        }
        ObfuscationMethod::FitnessBuckets(_) | ObfuscationMethod::AboveThreshold(_) => {
            est.closed_form = false;
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_obfuscation() {
        let e = leakage_estimate(500, 300, &ObfuscationMethod::None).unwrap();
        assert_eq!(e.equations, 11_249_925_000);
        assert_eq!(e.inequations(), 0);
    }

    #[test]
    fn order() {
        let e = leakage_estimate(500, 300, &ObfuscationMethod::Order).unwrap();
        assert_eq!(e.equations, 124_750);
        // C(300, 2) · 500; the figure 22 450 000 often quoted for this case is an arithmetic slip.
        assert_eq!(e.within_population_inequations, 22_425_000);
        assert_eq!(e.cross_population_inequations, 37_300_250);
    }

    #[test]
    fn quantiles_and_top() {
        let q = leakage_estimate(500, 300, &ObfuscationMethod::OrderQuantiles(10)).unwrap();
        assert_eq!((q.equations, q.inequations(), q.approximate), (0, 20_250_000, false));
        let t = leakage_estimate(500, 300, &ObfuscationMethod::TopIndividuals(30)).unwrap();
        assert_eq!((t.equations, t.inequations()), (0, 4_050_000));
    }

    #[test]
    fn uneven_quantiles_are_flagged() {
        let q = leakage_estimate(1, 11, &ObfuscationMethod::OrderQuantiles(3)).unwrap();
        assert!(q.approximate);
        // Groups (3, 4, 4): 3·8 + 4·4.
        assert_eq!(q.inequations(), 40);
    }

    #[test]
    fn no_closed_form() {
        let b = leakage_estimate(500, 300, &ObfuscationMethod::FitnessBuckets(5)).unwrap();
        assert!(!b.closed_form);
        let a = leakage_estimate(500, 300, &ObfuscationMethod::AboveThreshold(80.0)).unwrap();
        assert!(!a.closed_form);
    }
}
