mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snsr_core::analysis::*;
use snsr_core::filter::*;
use snsr_core::graph::*;
use snsr_core::taskgen::*;
use snsr_core::BeliefVector;

fn setup(seed: u64, n: usize) -> (ChaCha8Rng, Laplacian, SpectralBasis) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(&mut rng, n, 0.3);
    let l = build_laplacian(&g, LaplacianKind::Combinatorial).unwrap();
    let b = eigendecompose(&l, 256).unwrap();
    (rng, l, b)
}

fn vertex(v: Vec<f64>) -> BeliefVector {
    BeliefVector::vertex(v).unwrap()
}

#[test]
fn certified_bounds_are_never_violated() {
    let (mut rng, l, basis) = setup(11, 16);
    let lm = estimate_lambda_max_default(&l).value;
    let lt = scale_laplacian(&l, lm).unwrap();
    let analytic = [
        AnalyticResponse::Diffusion { tau: 0.5 },
        AnalyticResponse::Diffusion { tau: 2.0 },
        AnalyticResponse::Highpass { beta: 0.5 },
        AnalyticResponse::Highpass { beta: 2.0 },
        AnalyticResponse::GaussianBandpass { center: 3.0, width: 0.5 },
        AnalyticResponse::Identity,
    ];
    let mut filters: Vec<Box<dyn Fn(&BeliefVector) -> BeliefVector>> = Vec::new();
    let mut bounds = Vec::new();
    for r in analytic {
        bounds.push(robustness_certificate((&r).into(), lm, DEFAULT_CERTIFICATE_GRID).unwrap().bound);
        let b = basis.clone();
        filters.push(Box::new(move |x| dense_filter_apply(&b, &r, x).unwrap()));
    }
    for _ in 0..4 {
        let theta = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = ChebyshevFilter::new(theta, lm).unwrap();
        bounds.push(robustness_certificate((&f).into(), lm, DEFAULT_CERTIFICATE_GRID).unwrap().bound);
        let lt = lt.clone();
        filters.push(Box::new(move |x| cheb_apply(&f, &lt, x, false).unwrap().0));
    }
    assert_eq!(filters.len(), 10);
    let mut violations = 0;
    for (h, bound) in filters.iter().zip(&bounds) {
        for _ in 0..1000 {
            let x = gaussian(&mut rng, 16);
            let xp: Vec<f64> = x.iter().map(|v| v + 0.1 * rng.random_range(-1.0..1.0)).collect();
            let (hx, hxp) = (h(&vertex(x.clone())), h(&vertex(xp.clone())));
            let dy: f64 = hx.as_slice().iter().zip(hxp.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let dx: f64 = x.iter().zip(&xp).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dy > bound * dx {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn band_energies_partition_total(seed in any::<u64>(), n in 2usize..30, bands in 1usize..6) {
        let (mut rng, _, basis) = setup(seed, n);
        let p = BandPartition::uniform(basis.lambda_max().max(1.0), bands).unwrap();
        let y = gaussian(&mut rng, n);
        let r = band_energy(&basis, &vertex(y.clone()), &p).unwrap();
        let e: f64 = y.iter().map(|v| v * v).sum();
        prop_assert!((r.total() - e).abs() <= 1e-9 * e);
        prop_assert!(r.energies.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn dirichlet_matches_spectral_sum(seed in any::<u64>(), n in 2usize..30) {
        let (mut rng, l, basis) = setup(seed, n);
        let y = gaussian(&mut rng, n);
        let d = dirichlet_energy(&l, &vertex(y.clone())).unwrap();
        let s: f64 = basis.eigenvalues.iter().zip(basis.forward(&y)).map(|(l, c)| l * c * c).sum();
        prop_assert!((d - s).abs() <= 1e-9 * s.max(1e-12));
    }

    #[test]
    fn edits_compose_bandwise(seed in any::<u64>(), g in prop::collection::vec(-2.0f64..2.0, 3), h in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (mut rng, _, basis) = setup(seed, 20);
        let p = BandPartition::three_band(basis.lambda_max().max(1.0)).unwrap();
        let x = vertex(gaussian(&mut rng, 20));
        let e = |v: &[f64]| (0..3).map(|b| (b, v[b])).collect::<Vec<_>>();
        let twice = spectral_edit(&basis, &spectral_edit(&basis, &x, &e(&g), &p).unwrap(), &e(&h), &p).unwrap();
        let gh: Vec<f64> = g.iter().zip(&h).map(|(a, b)| a * b).collect();
        let once = spectral_edit(&basis, &x, &e(&gh), &p).unwrap();
        prop_assert!(rel_err(twice.as_slice(), once.as_slice()) <= 1e-10 || once.norm() < 1e-12);
    }

    #[test]
    fn gain_two_quadruples_band_energy(seed in any::<u64>(), band in 0usize..3) {
        let (mut rng, _, basis) = setup(seed, 24);
        let p = BandPartition::three_band(basis.lambda_max().max(1.0)).unwrap();
        let x = vertex(gaussian(&mut rng, 24));
        let before = band_energy(&basis, &x, &p).unwrap();
        let after = band_energy(&basis, &spectral_edit(&basis, &x, &[(band, 2.0)], &p).unwrap(), &p).unwrap();
        for b in 0..3 {
            let want = if b == band { 4.0 * before.energies[b] } else { before.energies[b] };
            prop_assert!((after.energies[b] - want).abs() <= 1e-10 * before.total());
        }
    }

    #[test]
    fn perturbation_has_requested_norm_and_stays_in_band(seed in any::<u64>(), mag in 0.0f64..5.0) {
        let (mut rng, _, basis) = setup(seed, 24);
        let p = BandPartition::three_band(basis.lambda_max().max(1.0)).unwrap();
        let x = vertex(gaussian(&mut rng, 24));
        let bands = p.assign(&basis.eigenvalues).unwrap();
        let band = bands[bands.len() - 1];
        let y = spectral_perturb(&basis, &x, band, mag, &p, seed).unwrap();
        let d: Vec<f64> = y.as_slice().iter().zip(x.as_slice()).map(|(a, b)| a - b).collect();
        let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((dn - mag).abs() <= 1e-10 * (1.0 + mag));
        let dh = basis.forward(&d);
        for (c, b) in dh.iter().zip(&bands) {
            if *b != band {
                prop_assert!(c.abs() <= 1e-12 * (1.0 + mag));
            }
        }
    }

    #[test]
    fn covariance_is_psd_with_trace_identity(seed in any::<u64>(), n in 2usize..20) {
        let (mut rng, _, basis) = setup(seed, n);
        let var: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let x = vertex(gaussian(&mut rng, n));
        let c = spectral_covariance(&basis, &var, &x, true).unwrap();
        let m = c.vertex_matrix.clone().unwrap();
        prop_assert!((m.trace() - c.trace()).abs() <= 1e-10 * (1.0 + c.trace()));
        let min = oracle_eigenvalues(&m)[0];
        prop_assert!(min >= -1e-9);
    }

    #[test]
    fn cospectral_loss_is_a_squared_metric(a in prop::collection::vec(-5.0f64..5.0, 8), b in prop::collection::vec(-5.0f64..5.0, 8)) {
        let s = |v: &[f64]| BeliefVector::spectral(v.to_vec()).unwrap();
        let (sa, sb) = (s(&a), s(&b));
        let zero = BeliefVector::spectral(vec![0.0; 8]).unwrap();
        prop_assert_eq!(cospectral_loss(&sa, &sa).unwrap(), 0.0);
        prop_assert_eq!(cospectral_loss(&sa, &sb).unwrap(), cospectral_loss(&sb, &sa).unwrap());
        // ‖a+b‖² + ‖a−b‖² = 2‖a‖² + 2‖b‖².
        let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
        let lhs = cospectral_loss(&sa, &s(&neg_b)).unwrap() + cospectral_loss(&sa, &sb).unwrap();
        let rhs = 2.0 * cospectral_loss(&sa, &zero).unwrap() + 2.0 * cospectral_loss(&sb, &zero).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }
}

#[test]
fn cross_size_transfer_is_finite() {
    let (mut r1, _, b1) = setup(1, 12);
    let (_, _, b2) = setup(2, 20);
    let x1 = vertex(gaussian(&mut r1, 12));
    let x2 = vertex(gaussian(&mut r1, 20));
    let loss = cospectral_loss_across(&b1, &x1, &b2, &x2).unwrap();
    assert!(loss.is_finite() && loss >= 0.0);
    assert_eq!(cospectral_loss_across(&b1, &x1, &b1, &x1).unwrap(), 0.0);
}

#[test]
fn lowpass_model_shrugs_off_high_band_noise() {
    let params = CommunityParams::default();
    let tasks: Vec<_> = (0..6).map(|s| gen_community_task(&params, s).unwrap()).collect();
    let model = Model::Response {
        response: AnalyticResponse::Diffusion { tau: 1.0 },
        order: None,
    };
    let pert = |band| PerturbationConfig { band, magnitude: 2.0, seed: 5 };
    let low = robustness_drop(&model, &tasks, &pert(0), None).unwrap();
    let high = robustness_drop(&model, &tasks, &pert(2), None).unwrap();
    assert!(high <= low, "high-band drop {high} vs low-band drop {low}");
    let none = robustness_drop(&model, &tasks, &PerturbationConfig { band: 0, magnitude: 0.0, seed: 5 }, None).unwrap();
    assert_eq!(none, 0.0);
    assert_eq!(low, robustness_drop(&model, &tasks, &pert(0), None).unwrap());
}
