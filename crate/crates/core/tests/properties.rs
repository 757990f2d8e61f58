mod common;

use std::collections::BTreeSet;

use delta_forge::geom::{kernel, Point, Simplex};
use delta_forge::io::{format_net, parse_net, Report};
use delta_forge::net::{sample_ball, Net};
use delta_forge::verify::{best_ball, best_ball_numeric};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coords(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, m), n)
}

/// `n` points in ℝ^m, optionally squashed towards a hyperplane so that thin
/// simplices turn up often.
fn simplex(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (coords(m, n), prop::sample::select(vec![1.0, 1e-1, 1e-2, 1e-3])).prop_map(|(mut pts, squash)| {
        for p in &mut pts {
            p[0] *= squash;
        }
        pts
    })
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(2, 3), (3, 3), (3, 4), (4, 3), (4, 4), (4, 5)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn faces_are_closed_under_subsets(verts in prop::collection::btree_set(0usize..40, 1..6)) {
        let s = Simplex::new(verts.iter().copied().collect()).unwrap();
        let faces: BTreeSet<Vec<usize>> = s.faces().iter().map(|f| f.vertices().to_vec()).collect();
        prop_assert_eq!(faces.len(), (1 << verts.len()) - 1);
        for f in s.faces() {
            for g in f.faces() {
                prop_assert!(faces.contains(g.vertices()));
            }
        }
        let dims: Vec<usize> = s.faces().iter().map(|f| f.len()).collect();
        prop_assert!(dims.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bad_iff_flake_face(
        (pts, g) in dims().prop_flat_map(|(m, n)| (simplex(m, n), prop::sample::select(vec![0.01, 0.05, 0.2, 0.5])))
    ) {
        prop_assume!(common::closest_to_threshold(&pts, g) > 1e-7);
        let good = kernel::is_gamma_good(&pts, g);
        prop_assert_eq!(good, common::is_good(&pts, g));
        match kernel::find_flake_face(&pts, g) {
            None => prop_assert!(good),
            Some(face) => {
                prop_assert!(!good);
                let mask = face.iter().fold(0u32, |m, &i| m | (1 << i));
                prop_assert!(common::is_flake(&pts, mask, g));
            }
        }
    }

    #[test]
    fn circumcentre_is_equidistant_and_affine((m, n, pts) in dims().prop_flat_map(|(m, n)| (Just(m), Just(n), coords(m, n)))) {
        prop_assume!(common::thickness(&pts) > 1e-3);
        let c = kernel::circumsphere(&pts);
        prop_assert!(c.exists);
        let scale = common::diameter(&pts);
        for p in &pts {
            let d = common::dist(p, c.center.coords());
            prop_assert!((d - c.radius).abs() <= 1e-9 * scale.max(c.radius), "{} vs {}", d, c.radius);
        }
        if n <= m {
            let base: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            let off = common::distance_to_hull(c.center.coords(), &base);
            prop_assert!(off <= 1e-9 * scale.max(c.radius), "centre off the hull by {}", off);
        }
        // the radius is minimal among spheres through the vertices
        prop_assert!(c.radius >= scale / 2.0 * (1.0 - 1e-12));
    }

    #[test]
    fn dihedral_ratio_is_symmetric(
        (pts, i, j) in dims().prop_flat_map(|(m, n)| (coords(m, n), 0..n, 1..n)).prop_map(|(p, i, d)| {
            let n = p.len();
            (p, i, (i + d) % n)
        })
    ) {
        prop_assume!(common::thickness(&pts) > 1e-4);
        let a = kernel::dihedral_sin(&pts, i, j).unwrap();
        let b = kernel::dihedral_sin(&pts, j, i).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()), "{} vs {}", a, b);
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-12);
    }

    #[test]
    fn net_format_round_trips(
        pts in (1usize..4).prop_flat_map(|m| prop::collection::vec(prop::collection::vec(-1e6f64..1e6, m), 1..20)),
        eps in 1e-6f64..1e3,
        mu0 in 1e-6f64..=1.0,
    ) {
        let net = Net::new(pts.into_iter().map(Point::new).collect(), eps, mu0, false).unwrap();
        let text = format_net(&net);
        let back = parse_net(&text).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(format_net(&back), text);
    }

    #[test]
    fn report_round_trips(
        entries in prop::collection::vec(
            ("[a-z]{1,8}", "[a-z][a-z0-9_.]{0,12}", "[!-~]([ -~]{0,20}[!-~])?"),
            0..30,
        )
    ) {
        let mut r = Report::new();
        for (s, k, v) in &entries {
            r.set(s, k.as_str(), v.as_str());
        }
        let text = r.render();
        let back = Report::parse(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn ball_samples_stay_inside(m in 1usize..6, radius in 1e-6f64..10.0, seed in any::<u64>(), centre in prop::collection::vec(-5.0f64..5.0, 5)) {
        let c = Point::new(centre[..m].to_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = sample_ball(&c, radius, false, &mut rng);
            prop_assert_eq!(x.dim(), m);
            prop_assert!(x.distance(&c) <= radius);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_ball_beats_search(
        (facet, p, r_lim) in prop::sample::select(vec![(2usize, 2usize), (3, 2), (3, 3), (4, 3)])
            .prop_flat_map(|(m, k)| (coords(m, k), prop::collection::vec(-1.5f64..1.5, m), 1.0f64..3.0))
    ) {
        prop_assume!(common::thickness(&facet) > 1e-2);
        let closed = best_ball(&p, &facet, r_lim);
        let numeric = best_ball_numeric(&p, &facet, r_lim);
        match (closed, numeric) {
            (Some(c), Some(n)) => {
                prop_assert!(c.radius <= r_lim * (1.0 + 1e-12));
                prop_assert!(c.gap <= n.gap + 1e-7, "closed form {} vs search {}", c.gap, n.gap);
                for v in &facet {
                    let d = common::dist(v, &c.center);
                    prop_assert!((d - c.radius).abs() <= 1e-9 * c.radius.max(1.0));
                }
            }
            (None, None) => {}
            (c, n) => prop_assert!(false, "feasibility disagrees: {:?} vs {:?}", c.is_some(), n.is_some()),
        }
    }
}
