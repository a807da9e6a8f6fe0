//! Zero-mean projection for pure-Neumann problems.

/// `x ← x - (Σ w_k x_k / Σ w_k)·1`. With lumped-mass weights the discrete
/// integral of `x` vanishes afterwards; `None` uses unit weights.
pub fn project_zero_mean(x: &mut [f64], weights: Option<&[f64]>) {
    if x.is_empty() {
        return;
    }
    let mean = weighted_mean(x, weights);
    for v in x.iter_mut() {
        *v -= mean;
    }
}

pub fn weighted_mean(x: &[f64], weights: Option<&[f64]>) -> f64 {
    match weights {
        Some(w) => {
            assert_eq!(w.len(), x.len(), "weight length");
            let (s, ws) = x
                .iter()
                .zip(w)
                .fold((0.0, 0.0), |(s, ws), (&v, &wk)| (s + wk * v, ws + wk));
            s / ws
        }
        None => x.iter().sum::<f64>() / x.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let mut x = [1.0, 3.0];
        project_zero_mean(&mut x, Some(&[1.0, 1.0]));
        assert_eq!(x, [-1.0, 1.0]);
        let mut c = [2.5; 4];
        project_zero_mean(&mut c, None);
        assert_eq!(c, [0.0; 4]);
    }

    proptest! {
        #[test]
        fn idempotent_and_shift_invariant(
            pairs in prop::collection::vec((-10.0..10.0f64, 0.1..2.0f64), 1..40),
            shift in -5.0..5.0f64,
        ) {
            let (x, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let mut p = x.clone();
            project_zero_mean(&mut p, Some(&w));
            prop_assert!(weighted_mean(&p, Some(&w)).abs() < 1e-12);
            let mut pp = p.clone();
            project_zero_mean(&mut pp, Some(&w));
            for (a, b) in p.iter().zip(&pp) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let mut s: Vec<f64> = x.iter().map(|v| v + shift).collect();
            project_zero_mean(&mut s, Some(&w));
            for (a, b) in p.iter().zip(&s) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
