use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcpm_core::cheb::{chebyshev_t, feature_vector, make_grid, ChebTransform, DomainBox};
use qcpm_core::diagnostics::nonpurity;
use qcpm_core::model::{extract_coefficients, model_amplitude, oracle_eval, ModelSpec, QcpmParams};
use qcpm_core::sampler::{draw_samples, exact_distribution};
use qcpm_core::sim::{Entangler, StateVector};

fn spec(n: usize, depth: usize, cc: bool, closed: bool) -> ModelSpec {
    ModelSpec {
        n_qubits: n,
        depth,
        use_correlation: cc,
        entangler: if closed {
            Entangler::Closed
        } else {
            Entangler::Open
        },
    }
}

fn params(s: &ModelSpec, seed: u64) -> QcpmParams {
    QcpmParams::random(s, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn arb_spec() -> impl Strategy<Value = ModelSpec> {
    (1usize..=3, 0usize..=3, any::<bool>(), any::<bool>())
        .prop_map(|(n, d, cc, c)| spec(n, d, cc, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_matches_trig_form(k in 0usize..64, x in -1.0f64..=1.0) {
        let t = chebyshev_t(k, x).unwrap();
        prop_assert!((t - (k as f64 * x.acos()).cos()).abs() < 1e-11);
    }

    #[test]
    fn feature_norm_matches_trig_sum(n in 1usize..=6, x in -1.0f64..=1.0) {
        let f = feature_vector(x, n).unwrap();
        let m = 1usize << n;
        let t = x.acos();
        let direct: f64 = (0..m)
            .map(|k| {
                let w2 = if k == 0 { 0.5f64.powi(n as i32) } else { 0.5f64.powi(n as i32 - 1) };
                w2 * (k as f64 * t).cos().powi(2)
            })
            .sum();
        prop_assert!((f.norm_squared() - direct).abs() < 1e-12);
        prop_assert!(f.norm_squared() <= 2.0 + 1e-12);
    }

    #[test]
    fn transform_round_trip(n in 1usize..=6, seed in any::<u64>()) {
        let d = ChebTransform::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..d.dim()).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let back = d.to_coefficients(&d.to_nodes(&c));
        for (a, b) in c.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_maps_invert(z in 0.01f64..=1.0, q in 1.0f64..=1e4) {
        let b = DomainBox::fragmentation();
        let (u, v) = (b.to_unit_x(z).unwrap(), b.to_unit_y(q).unwrap());
        prop_assert!((-1.0..=1.0).contains(&u) && (-1.0..=1.0).contains(&v));
        prop_assert!((b.from_unit_x(u).unwrap() - z).abs() < 1e-12);
        prop_assert!((b.from_unit_y(v).unwrap() / q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_agrees_with_oracle(s in arb_spec(), seed in any::<u64>(), u in -1.0f64..=1.0, v in -1.0f64..=1.0) {
        let p = params(&s, seed);
        let a = model_amplitude(u, v, &p, &s).unwrap();
        let m = extract_coefficients(&p, &s).unwrap();
        prop_assert!((a - oracle_eval(&m, u, v).unwrap()).abs() < 1e-10);
        // unit coefficient state, so |A| <= |tau(u)| |tau(v)|
        prop_assert!((m.norm_squared() - 1.0).abs() < 1e-12);
        let bound = (feature_vector(u, s.n_qubits).unwrap().norm_squared()
            * feature_vector(v, s.n_qubits).unwrap().norm_squared()).sqrt();
        prop_assert!(a.abs() <= bound + 1e-12);
    }

    #[test]
    fn uncorrelated_models_factorize(s in arb_spec(), seed in any::<u64>()) {
        let s = ModelSpec { use_correlation: false, ..s };
        let p = params(&s, seed);
        prop_assert_eq!(extract_coefficients(&p, &s).unwrap().rank(1e-9), 1);
        prop_assert!(nonpurity(&p, &s).unwrap() < 1e-12);
    }

    #[test]
    fn distributions_are_normalized(s in arb_spec(), seed in any::<u64>(), ext in 0usize..=2) {
        let dist = exact_distribution(&params(&s, seed), &s, ext).unwrap();
        prop_assert_eq!(dist.probabilities().len(), 1usize << (2 * (s.n_qubits + ext)));
        prop_assert!((dist.total() - 1.0).abs() < 1e-10);
        prop_assert!(dist.probabilities().iter().all(|&p| p >= 0.0));
        let mz: f64 = dist.marginal_z().iter().sum();
        prop_assert!((mz - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampling_conserves_shots(seed in any::<u64>(), shots in 1u64..5000) {
        let s = spec(2, 1, true, true);
        let dist = exact_distribution(&params(&s, seed), &s, 1).unwrap();
        let h = draw_samples(&dist, shots, seed).unwrap();
        prop_assert_eq!(h.counts().iter().sum::<u64>(), shots);
        let again = draw_samples(&dist, shots, seed).unwrap();
        prop_assert_eq!(h.counts(), again.counts());
        let tv = h.total_variation(&dist);
        prop_assert!((0.0..=1.0).contains(&tv));
    }

    #[test]
    fn register_purities_agree(s in arb_spec(), seed in any::<u64>()) {
        let p = params(&s, seed);
        let st = qcpm_core::sampler::coefficient_state(&p, &s).unwrap();
        let gz = st.partial_trace(&s.z_qubits()).unwrap().purity();
        let gq = st.partial_trace(&s.q_qubits()).unwrap().purity();
        prop_assert!((gz - gq).abs() < 1e-10);
        prop_assert!(gz <= 1.0 + 1e-12 && gz >= 1.0 / (1u64 << s.n_qubits) as f64 - 1e-12);
    }

    #[test]
    fn flat_parameter_layout_round_trips(s in arb_spec(), seed in any::<u64>()) {
        let p = params(&s, seed);
        let flat = p.to_flat();
        prop_assert_eq!(flat.len(), s.trainable_count());
        prop_assert_eq!(QcpmParams::from_flat(&s, &flat).unwrap(), p);
    }
}

#[test]
fn lattice_has_nodes_then_half_nodes() {
    for n in 1..=5 {
        let g = make_grid(n).unwrap();
        let m = 1usize << n;
        assert_eq!(g.training_lattice().len(), m * m + (m - 1) * (m - 1));
    }
}

#[test]
fn ansatz_preserves_norm() {
    let s = spec(3, 2, true, true);
    let p = params(&s, 4);
    let mut st = StateVector::basis(3, 5);
    qcpm_core::sim::hera(&mut st, &p.theta, &s.ansatz(), false).unwrap();
    assert!((st.norm_squared() - 1.0).abs() < 1e-12);
    qcpm_core::sim::hera(&mut st, &p.theta, &s.ansatz(), true).unwrap();
    assert!((st.amplitudes()[5].re - 1.0).abs() < 1e-12);
}
