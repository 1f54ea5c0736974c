mod common;

use std::f64::consts::PI;

use common::*;
use hermite_core::{
    apply_transform, hb_lr_step, ihb_step, refine, refine_only, AlphaVariant, HermiteSequence,
    RefineConfig, Scheme, SimilarityTransform, Topology,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn schemes() -> impl Strategy<Value = Scheme> {
    prop_oneof![
        Just(Scheme::Ihb),
        (1usize..=4).prop_map(Scheme::HbLr),
        (1usize..=4).prop_map(Scheme::LinearLr),
    ]
}

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize), Just(5usize)]
}

/// Sorted angles in `[0, 2π)` at least `min_gap` apart, with a wrap-around gap
/// below π so the closed polygon stays admissible.
fn circle_angles() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2..1.0f64, 4..9).prop_map(|w| {
        let total: f64 = w.iter().sum();
        let mut t = 0.0;
        w.iter()
            .map(|x| {
                let a = t;
                t += 2.0 * PI * x / total;
                a
            })
            .collect()
    })
}

fn max_point_norm(s: &HermiteSequence) -> f64 {
    s.pairs().iter().map(|p| p.point.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn ihb_keeps_the_input_at_even_positions(seed in any::<u64>(), dim in dims(), levels in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, dim, 5);
        let mut cur = data;
        for _ in 0..levels {
            let next = ihb_step(&cur, AlphaVariant::EndAngles).unwrap();
            for (i, p) in cur.pairs().iter().enumerate() {
                prop_assert_eq!(&next.pairs()[2 * i], p);
            }
            cur = next;
        }
    }

    #[test]
    fn lines_are_reproduced(
        scheme in schemes(),
        origin in prop::collection::vec(-3.0..3.0f64, 3),
        dir in prop::collection::vec(-1.0..1.0f64, 3).prop_filter("nonzero", |v| norm(v) > 0.1),
        steps in prop::collection::vec(0.2..1.5f64, 2..7),
        levels in 0usize..6,
    ) {
        let u = normalized(&dir);
        let mut s = 0.0;
        let mut pairs = vec![pair(&origin, &u)];
        for h in &steps {
            s += h;
            let p: Vec<f64> = origin.iter().zip(&u).map(|(o, d)| o + s * d).collect();
            pairs.push(pair(&p, &u));
        }
        let data = HermiteSequence::open(pairs).unwrap();
        let out = refine_only(&data, &RefineConfig::new(scheme, levels)).unwrap();
        let size = 1.0 + norm(&origin) + s;
        for p in out.pairs() {
            let d = sub(p.point.as_slice(), &origin);
            let along = dot(&d, &u);
            let off: Vec<f64> = d.iter().zip(&u).map(|(x, y)| x - along * y).collect();
            prop_assert!(norm(&off) <= 1e-12 * size);
            prop_assert!(max_abs_diff(p.tangent.as_slice(), &u) <= 1e-12);
        }
    }

    #[test]
    fn circles_are_reproduced(
        angles in circle_angles(),
        radius in 0.1..10.0f64,
        m in 1usize..=4,
        lr in any::<bool>(),
        closed in any::<bool>(),
    ) {
        let topology = if closed { Topology::Closed } else { Topology::Open };
        let data = circle_sequence(radius, &angles, topology);
        let scheme = if lr { Scheme::HbLr(m) } else { Scheme::Ihb };
        let out = refine_only(&data, &RefineConfig::for_topology(scheme, 6, topology)).unwrap();
        for p in out.pairs() {
            let r = p.point.norm();
            prop_assert!((r - radius).abs() <= 1e-10 * radius);
            prop_assert!((p.point.dot(p.tangent.as_vector()) / r).abs() <= 1e-9);
        }
    }

    #[test]
    fn refine_commutes_with_similarities(seed in any::<u64>(), dim in dims(), lr in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, dim, 5);
        let t = SimilarityTransform::random(dim, &mut rng);
        let cfg = RefineConfig::new(if lr { Scheme::HbLr(3) } else { Scheme::Ihb }, 4);
        let left = apply_transform(&refine_only(&data, &cfg).unwrap(), &t).unwrap();
        let right = refine_only(&apply_transform(&data, &t).unwrap(), &cfg).unwrap();
        let size = 1.0 + max_point_norm(&right);
        for (x, y) in left.pairs().iter().zip(right.pairs()) {
            prop_assert!(x.point.max_abs_diff(&y.point) <= 1e-10 * size);
            prop_assert!(x.tangent.as_vector().max_abs_diff(y.tangent.as_vector()) <= 1e-10);
        }
    }

    #[test]
    fn sigma_contracts_level_by_level(seed in any::<u64>(), dim in dims(), lr in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, dim, 5);
        let scheme = if lr { Scheme::HbLr(3) } else { Scheme::Ihb };
        let (_, trace) = refine(&data, &RefineConfig::new(scheme, 6)).unwrap();
        for w in trace.rows.windows(2) {
            if w[0].sigma_sup <= 0.75 * PI && w[0].sigma_sup > 1e-9 {
                prop_assert!(w[1].sigma_sup <= 0.9f64.sqrt() * w[0].sigma_sup + 1e-12);
            }
        }
    }

    #[test]
    fn tangents_line_up_with_chords(seed in any::<u64>(), dim in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, dim, 4);
        let (out, trace) = refine(&data, &RefineConfig::new(Scheme::Ihb, 8)).unwrap();
        let sigma = trace.rows.last().unwrap().sigma_sup;
        for w in out.pairs().windows(2) {
            let chord = sub(w[1].point.as_slice(), w[0].point.as_slice());
            prop_assert!(acos_angle(w[0].tangent.as_slice(), &chord) <= sigma + 1e-7);
        }
    }

    #[test]
    fn first_order_lane_riesenfeld_is_ihb(seed in any::<u64>(), dim in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, dim, 5);
        prop_assert_eq!(
            hb_lr_step(&data, 1, AlphaVariant::EndAngles).unwrap(),
            ihb_step(&data, AlphaVariant::EndAngles).unwrap()
        );
    }

    #[test]
    fn zero_levels_is_the_identity(seed in any::<u64>(), scheme in schemes()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_smooth_sequence(&mut rng, 3, 5);
        prop_assert_eq!(refine_only(&data, &RefineConfig::new(scheme, 0)).unwrap(), data);
    }
}

#[test]
fn output_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = random_smooth_sequence(&mut rng, 2, 6);
    assert_eq!(
        refine_only(&data, &RefineConfig::new(Scheme::Ihb, 1))
            .unwrap()
            .len(),
        11
    );
    for m in 1..=4 {
        let out = refine_only(&data, &RefineConfig::new(Scheme::LinearLr(m), 1)).unwrap();
        let expect = if m == 1 { 11 } else { 12 - m + 2 };
        assert_eq!(out.len(), expect, "m = {m}");
        assert_eq!(out.pairs()[0].point, data.pairs()[0].point);
        assert_eq!(out.pairs().last().unwrap().point, data.pairs()[5].point);
    }
    let circle = circle_sequence(1.0, &[0.0, 1.5, 3.0, 4.5], Topology::Closed);
    let out = refine_only(
        &circle,
        &RefineConfig::for_topology(Scheme::HbLr(3), 2, Topology::Closed),
    )
    .unwrap();
    assert_eq!(out.len(), 16);
}
