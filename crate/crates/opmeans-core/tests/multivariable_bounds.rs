//! Order and functional inequalities for the multivariable geodesic means:
//! arithmetic–harmonic sandwich, spectral-rearrangement log-majorization,
//! bottom-product superadditivity, the weighted norm / anti-norm product
//! bounds, and the monotonicity lemmas for derived anti-norms.

use opmeans_core::antinorm::{evaluate_antinorm, evaluate_norm, AntiNormSpec, NormSpec};
use opmeans_core::hermitian::{loewner_geq, sorted_diagonal};
use opmeans_core::majorization::{eigenvalue_dominates, log_majorizes, log_supermajorizes};
use opmeans_core::matfun::{invm, matrix_function};
use opmeans_core::multi::{
    geodesic_mean_m, karcher_mean, KarcherConfig, SimplexMeasure, WeightVector,
};
use opmeans_core::opmean::weighted_geometric;
use opmeans_core::sample::{haar_unitary, sample_psd, PsdSamplerConfig};
use opmeans_core::scalar;
use opmeans_core::HermitianMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pd(rng: &mut ChaCha8Rng, dim: usize, cond: f64) -> HermitianMatrix {
    let cfg = PsdSamplerConfig::new(dim).with_condition(cond);
    sample_psd(rng, &cfg).unwrap().matrix
}

fn pd_family(rng: &mut ChaCha8Rng, m: usize, dim: usize, cond: f64) -> Vec<HermitianMatrix> {
    (0..m).map(|_| pd(rng, dim, cond)).collect()
}

fn tight_cfg() -> KarcherConfig {
    KarcherConfig {
        tol_grad: Some(1e-12),
        max_iter: 2000,
        step: 1.0,
    }
}

/// Anti-norms of the derived family (vanishing on singular matrices) plus
/// the bottom-product functionals arising as their small-power limits.
fn derived_specs(dim: usize) -> Vec<AntiNormSpec> {
    let mut specs = vec![
        AntiNormSpec::neg_schatten(1.0).unwrap(),
        AntiNormSpec::neg_schatten(0.5).unwrap(),
        AntiNormSpec::schatten_kyfan(1.0, 2).unwrap(),
        AntiNormSpec::derived(NormSpec::schatten(2.0).unwrap(), 1.0).unwrap(),
        AntiNormSpec::derived(NormSpec::kyfan(2).unwrap(), 2.0).unwrap(),
        AntiNormSpec::delta(1).unwrap(),
        AntiNormSpec::delta(2).unwrap(),
        AntiNormSpec::Minkowski,
    ];
    specs.retain(|s| match s {
        AntiNormSpec::SchattenKyFan { k, .. } | AntiNormSpec::Delta { k } => *k <= dim,
        _ => true,
    });
    specs
}

fn symmetric_norm_specs() -> Vec<NormSpec> {
    vec![
        NormSpec::Trace,
        NormSpec::Operator,
        NormSpec::kyfan(2).unwrap(),
        NormSpec::schatten(2.0).unwrap(),
    ]
}

/// Scalar multivariable geodesic mean evaluated through 1×1 matrices so it
/// shares the exact Monte-Carlo weight draws with the matrix-side call.
fn scalar_geodesic_mean(nu: &SimplexMeasure, values: &[f64], seed: u64) -> f64 {
    let mats: Vec<HermitianMatrix> = values
        .iter()
        .map(|&v| HermitianMatrix::from_diag(&[v]))
        .collect();
    let m = geodesic_mean_m(nu, &mats, &tight_cfg(), seed).unwrap();
    m.eigenvalues().unwrap()[0]
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> opmeans_core::cmatrix::CMatrix {
    let u = haar_unitary(rng, n);
    let v = haar_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    u.mul(HermitianMatrix::from_diag(&d).as_cmatrix())
        .unwrap()
        .mul(&v)
        .unwrap()
}

#[test]
fn karcher_mean_is_congruence_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for dim in [2usize, 3] {
        let mats = pd_family(&mut rng, 3, dim, 20.0);
        let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let x = random_invertible(&mut rng, dim);
        let direct = karcher_mean(&w, &mats, &tight_cfg())
            .unwrap()
            .mean
            .congruence(&x)
            .unwrap();
        let moved: Vec<HermitianMatrix> =
            mats.iter().map(|a| a.congruence(&x).unwrap()).collect();
        let pushed = karcher_mean(&w, &moved, &tight_cfg()).unwrap().mean;
        let dev = direct.sub(&pushed).unwrap().frobenius_norm();
        assert!(
            dev <= 1e-7 * (1.0 + direct.frobenius_norm()),
            "congruence transport failed at dim {dim}: deviation {dev:.3e}"
        );
    }
}

#[test]
fn geodesic_mean_sits_between_weighted_harmonic_and_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(223);
    let mats = pd_family(&mut rng, 3, 3, 25.0);
    let nu = SimplexMeasure::from_atoms(vec![
        (WeightVector::new(vec![0.6, 0.2, 0.2]).unwrap(), 0.25),
        (WeightVector::new(vec![0.1, 0.4, 0.5]).unwrap(), 0.75),
    ])
    .unwrap();
    let mean = geodesic_mean_m(&nu, &mats, &tight_cfg(), 1).unwrap();
    // Measure-averaged weights of each operand.
    let mut wbar = vec![0.0f64; 3];
    for (w, mass) in &nu.atoms {
        for (i, &wi) in w.weights.iter().enumerate() {
            wbar[i] += mass * wi;
        }
    }
    let mut arith = HermitianMatrix::from_diag(&vec![0.0; 3]);
    let mut harm_inv = HermitianMatrix::from_diag(&vec![0.0; 3]);
    for (a, &wi) in mats.iter().zip(&wbar) {
        arith = arith.add(&a.scale(wi)).unwrap();
        harm_inv = harm_inv.add(&invm(a).unwrap().scale(wi)).unwrap();
    }
    let harm = invm(&harm_inv).unwrap();
    assert!(
        loewner_geq(&arith, &mean, 1e-7).unwrap(),
        "mean exceeds its weighted arithmetic bound"
    );
    assert!(
        loewner_geq(&mean, &harm, 1e-7).unwrap(),
        "mean dips below its weighted harmonic bound"
    );
}

#[test]
fn karcher_mean_is_log_majorized_by_sorted_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(227);
    for dim in [2usize, 3, 4] {
        let mats = pd_family(&mut rng, 3, dim, 30.0);
        let w = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let g = karcher_mean(&w, &mats, &tight_cfg()).unwrap().mean;
        let sorted: Vec<HermitianMatrix> = mats
            .iter()
            .map(|a| sorted_diagonal(a, true).unwrap())
            .collect();
        let g_sorted = karcher_mean(&w, &sorted, &tight_cfg()).unwrap().mean;
        let verdict = log_majorizes(&g, &g_sorted, 1e-6).unwrap();
        assert!(
            verdict.holds,
            "sorted-spectra log-majorization failed at dim {dim}: margin {} at k={}",
            verdict.worst_margin, verdict.worst_k
        );
    }
}

#[test]
fn bottom_products_of_the_mean_dominate_the_scalar_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(229);
    let dim = 3usize;
    let mats = pd_family(&mut rng, 3, dim, 20.0);
    let atom_measure = SimplexMeasure::from_atoms(vec![
        (WeightVector::new(vec![0.5, 0.25, 0.25]).unwrap(), 0.4),
        (WeightVector::uniform(3), 0.6),
    ])
    .unwrap();
    let mc_measure = SimplexMeasure::uniform(64).unwrap();
    for (nu, seed) in [(&atom_measure, 7u64), (&mc_measure, 7u64)] {
        let mean = geodesic_mean_m(nu, &mats, &tight_cfg(), seed).unwrap();
        for k in 1..=dim {
            let spec = AntiNormSpec::delta(k).unwrap();
            let lhs = evaluate_antinorm(&spec, &mean).unwrap();
            let values: Vec<f64> = mats
                .iter()
                .map(|a| evaluate_antinorm(&spec, a).unwrap())
                .collect();
            let rhs = scalar_geodesic_mean(nu, &values, seed);
            assert!(
                lhs >= rhs - 1e-7 * (1.0 + lhs + rhs),
                "bottom-{k} product bound failed ({} atoms, mc={:?}): {lhs} < {rhs}",
                nu.atoms.len(),
                nu.mc_uniform
            );
        }
    }
}

#[test]
fn weighted_norm_product_bounds_the_karcher_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(233);
    let dim = 3usize;
    let mats = pd_family(&mut rng, 3, dim, 25.0);
    let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
    let g = karcher_mean(&w, &mats, &tight_cfg()).unwrap().mean;
    // Symmetric norms: the mean's norm is at most the weighted geometric
    // product of the operand norms.
    for spec in symmetric_norm_specs() {
        let lhs = evaluate_norm(&spec, &g).unwrap();
        let rhs: f64 = mats
            .iter()
            .zip(&w.weights)
            .map(|(a, &wi)| evaluate_norm(&spec, a).unwrap().powf(wi))
            .product();
        assert!(
            lhs <= rhs + 1e-7 * (1.0 + lhs + rhs),
            "norm product bound failed for {spec:?}: {lhs} > {rhs}"
        );
    }
    // Derived anti-norms: the inequality reverses.
    for spec in derived_specs(dim) {
        let lhs = evaluate_antinorm(&spec, &g).unwrap();
        let rhs: f64 = mats
            .iter()
            .zip(&w.weights)
            .map(|(a, &wi)| evaluate_antinorm(&spec, a).unwrap().powf(wi))
            .product();
        assert!(
            lhs >= rhs - 1e-7 * (1.0 + lhs + rhs),
            "anti-norm product bound failed for {spec:?}: {lhs} < {rhs}"
        );
        // The determinant identity of the mean makes the full-product case
        // an equality.
        if matches!(spec, AntiNormSpec::Minkowski) {
            assert!(
                (lhs - rhs).abs() <= 1e-7 * (1.0 + lhs + rhs),
                "determinant root should match exactly: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn concave_images_of_the_mean_dominate_in_derived_antinorms() {
    let mut rng = ChaCha8Rng::seed_from_u64(239);
    let dim = 3usize;
    let mats = pd_family(&mut rng, 3, dim, 15.0);
    let nu = SimplexMeasure::from_atoms(vec![
        (WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap(), 0.5),
        (WeightVector::uniform(3), 0.5),
    ])
    .unwrap();
    let seed = 11u64;
    let mean = geodesic_mean_m(&nu, &mats, &tight_cfg(), seed).unwrap();
    for fname in ["pow:0.5", "t/(t+1)", "1-exp(-t)"] {
        let f = scalar::by_name(fname).unwrap();
        let f_mean = matrix_function(&mean, &f.domain, |x| f.eval(x)).unwrap();
        for spec in derived_specs(dim) {
            let lhs = evaluate_antinorm(&spec, &f_mean).unwrap();
            let values: Vec<f64> = mats
                .iter()
                .map(|a| {
                    let fa = matrix_function(a, &f.domain, |x| f.eval(x)).unwrap();
                    evaluate_antinorm(&spec, &fa).unwrap()
                })
                .collect();
            let rhs = scalar_geodesic_mean(&nu, &values, seed);
            assert!(
                lhs >= rhs - 1e-7 * (1.0 + lhs + rhs),
                "concave image bound failed for {fname} under {spec:?}: {lhs} < {rhs}"
            );
        }
    }
}

#[test]
fn convex_images_of_the_mean_are_dominated_in_symmetric_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(241);
    let dim = 3usize;
    let mats = pd_family(&mut rng, 3, dim, 15.0);
    let nu = SimplexMeasure::from_atoms(vec![
        (WeightVector::new(vec![0.25, 0.25, 0.5]).unwrap(), 0.3),
        (WeightVector::uniform(3), 0.7),
    ])
    .unwrap();
    let seed = 13u64;
    let mean = geodesic_mean_m(&nu, &mats, &tight_cfg(), seed).unwrap();
    for gname in ["powsum:1*t^2", "powsum:1*t^2+0.5*t^-1"] {
        let g = scalar::by_name(gname).unwrap();
        let g_mean = matrix_function(&mean, &g.domain, |x| g.eval(x)).unwrap();
        for spec in symmetric_norm_specs() {
            let lhs = evaluate_norm(&spec, &g_mean).unwrap();
            let values: Vec<f64> = mats
                .iter()
                .map(|a| {
                    let ga = matrix_function(a, &g.domain, |x| g.eval(x)).unwrap();
                    evaluate_norm(&spec, &ga).unwrap()
                })
                .collect();
            let rhs = scalar_geodesic_mean(&nu, &values, seed);
            assert!(
                lhs <= rhs + 1e-7 * (1.0 + lhs + rhs),
                "convex image bound failed for {gname} under {spec:?}: {lhs} > {rhs}"
            );
        }
    }
}

#[test]
fn derived_antinorms_are_monotone_under_bottom_product_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(251);
    let dim = 4usize;
    for _ in 0..5 {
        // Build a pair where every bottom-k eigenvalue product of A dominates
        // that of B while the top eigenvalues do NOT dominate: compress the
        // spectrum of B toward its geometric mean and rotate to a new basis.
        let b = pd(&mut rng, dim, 60.0);
        let spec_b = b.eigenvalues().unwrap();
        let geo: f64 =
            (spec_b.iter().map(|&x| x.ln()).sum::<f64>() / dim as f64).exp();
        let spec_a: Vec<f64> = spec_b.iter().map(|&x| x.sqrt() * geo.sqrt()).collect();
        let u = haar_unitary(&mut rng, dim);
        let a = HermitianMatrix::from_diag(&spec_a).congruence(&u).unwrap();
        let premise = log_supermajorizes(&a, &b, 1e-10).unwrap();
        assert!(premise.holds, "constructed premise pair is invalid");
        assert!(
            !eigenvalue_dominates(&a, &b, 1e-10).unwrap().holds,
            "premise pair is too strong to be interesting"
        );
        for spec in derived_specs(dim) {
            let na = evaluate_antinorm(&spec, &a).unwrap();
            let nb = evaluate_antinorm(&spec, &b).unwrap();
            assert!(
                na >= nb - 1e-9 * (1.0 + na + nb),
                "monotonicity failed for {spec:?}: {na} < {nb}"
            );
        }
    }
}

#[test]
fn geometric_mean_is_superadditive_for_derived_antinorms() {
    let mut rng = ChaCha8Rng::seed_from_u64(257);
    let dim = 3usize;
    for &alpha in &[0.25f64, 0.5, 0.75] {
        for _ in 0..4 {
            let a = pd(&mut rng, dim, 30.0);
            let b = pd(&mut rng, dim, 30.0);
            let g = weighted_geometric(&a, &b, alpha).unwrap();
            for spec in derived_specs(dim) {
                let lhs = evaluate_antinorm(&spec, &g).unwrap();
                let rhs = evaluate_antinorm(&spec, &a)
                    .unwrap()
                    .powf(1.0 - alpha)
                    * evaluate_antinorm(&spec, &b).unwrap().powf(alpha);
                assert!(
                    lhs >= rhs - 1e-9 * (1.0 + lhs + rhs),
                    "geodesic superadditivity failed for {spec:?} at alpha={alpha}: {lhs} < {rhs}"
                );
            }
        }
    }
}
