use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circsep::analysis::certify::{certify, certify_general_cr, general_cr_mass};
use circsep::analysis::ppt::{ppt_blocks, ppt_full, EIG_TOL};
use circsep::density::constant_classes;

fn random_instance(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let c: Vec<f64> = (0..d).map(|_| rng.random_range(lo..hi)).collect();
    let w: Vec<f64> = (0..d * d).map(|_| rng.random_range(0.5..1.0)).collect();
    let s: f64 = w.iter().sum();
    (c, w.iter().map(|v| v / s).collect())
}

#[test]
fn root_sum_square_bound_implies_ppt_for_nonnegative_d3() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut hits = 0;
    for _ in 0..2000 {
        let (c, diag) = random_instance(&mut rng, 3, 0.0, 0.08);
        let Ok(rho) = constant_classes(3, &c, &diag) else {
            continue;
        };
        let min_diag = rho.min_diagonal();
        if c.iter().map(|v| v * v).sum::<f64>().sqrt() > min_diag {
            continue;
        }
        hits += 1;
        assert!(ppt_blocks(&rho, EIG_TOL).unwrap().passed, "c = {c:?}");
        assert!(ppt_full(rho.matrix(), 3, EIG_TOL).unwrap().0, "c = {c:?}");
    }
    assert!(hits > 100, "only {hits} sampled instances met the bound");
}

#[test]
fn root_sum_square_bound_fails_with_mixed_signs() {
    let c = [0.038681144103926104, -0.04437448759804927, 0.06192070235792348];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut found = false;
    for _ in 0..2000 {
        let (_, diag) = random_instance(&mut rng, 3, 0.0, 1.0);
        let Ok(rho) = constant_classes(3, &c, &diag) else {
            continue;
        };
        if c.iter().map(|v| v * v).sum::<f64>().sqrt() <= rho.min_diagonal()
            && !ppt_full(rho.matrix(), 3, EIG_TOL).unwrap().0
        {
            found = true;
            break;
        }
    }
    assert!(found);
}

#[test]
fn general_cr_never_beats_generic_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (mut special, mut generic) = (0, 0);
    for d in [3usize, 5] {
        for _ in 0..300 {
            let (c, diag) = random_instance(&mut rng, d, -0.3 / (d * d) as f64, 0.3 / (d * d) as f64);
            let Ok(rho) = constant_classes(d, &c, &diag) else {
                continue;
            };
            let Ok(v) = certify_general_cr(&rho, &c) else {
                continue;
            };
            let g = certify(&rho).map(|v| v.is_separable()).unwrap_or(false);
            if v.is_separable() {
                special += 1;
                assert!(g, "d={d}, c={c:?}");
                assert!(rho.min_diagonal() >= general_cr_mass(&c) - 1e-12);
            }
            if g {
                generic += 1;
            }
        }
    }
    assert!(special > 0 && generic >= special);
}
