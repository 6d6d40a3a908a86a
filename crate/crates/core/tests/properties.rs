use proptest::prelude::*;
use sqperm_core::encoding::{
    petrov_check, reconstruct_validated, satisfies_petrov, Label, LabelStats, XLabel,
};
use sqperm_core::fluctuations::Polyline;
use sqperm_core::local::{local_distance, restrict};
use sqperm_core::patterns::{inversions, occ_exact};
use sqperm_core::permuton::{box_distance_grid, GridCdf};
use sqperm_core::{is_square, project, records, Permutation};

fn any_perm(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn labels(max: usize) -> impl Strategy<Value = Vec<XLabel>> {
    prop::collection::vec(prop::bool::ANY.prop_map(XLabel::from_primary), 1..=max)
}

proptest! {
    #[test]
    fn inverse_is_involution(p in any_perm(40)) {
        prop_assert_eq!(p.inverse().inverse(), p.clone());
        prop_assert_eq!(p.reverse().reverse(), p.clone());
        prop_assert_eq!(p.complement().complement(), p);
    }

    #[test]
    fn squareness_is_symmetric(p in any_perm(9)) {
        let sq = is_square(&p);
        prop_assert_eq!(is_square(&p.reverse()), sq);
        prop_assert_eq!(is_square(&p.complement()), sq);
        prop_assert_eq!(is_square(&p.inverse()), sq);
    }

    #[test]
    fn records_cover_square_points(p in any_perm(9)) {
        let r = records(&p);
        let all = (1..=p.len()).all(|i| r.is_record(i));
        prop_assert_eq!(all, is_square(&p));
    }

    #[test]
    fn reconstruction_inverts_projection(p in any_perm(9)) {
        prop_assume!(is_square(&p));
        let q = project(&p).unwrap();
        prop_assert!(q.is_good() || p.len() < 3);
        if let Ok(back) = reconstruct_validated(&q) {
            prop_assert_eq!(back, p);
        }
    }

    #[test]
    fn label_stat_identities(x in labels(60)) {
        let s = LabelStats::new(&x);
        let n = x.len();
        for l in [XLabel::U, XLabel::D] {
            prop_assert_eq!(s.ct(l, 0), 0);
            for i in 1..=s.count(l) {
                let p = s.pos(l, i);
                prop_assert_eq!(s.ct(l, p), i);
                prop_assert_eq!(x[p - 1], l);
            }
            for i in 1..=n {
                prop_assert!(s.pos(l, s.ct(l, i)) <= i);
            }
            prop_assert_eq!(s.pos(l, s.count(l) + 1), n);
        }
        prop_assert_eq!(s.count(XLabel::U) + s.count(XLabel::D), n);
    }

    #[test]
    fn petrov_early_exit_agrees(x in labels(300)) {
        let s = LabelStats::new(&x);
        prop_assert_eq!(satisfies_petrov(&s, x.len()), petrov_check(&s, x.len()).passed);
    }

    #[test]
    fn occ_two_is_complementary(p in any_perm(60)) {
        prop_assume!(p.len() >= 2);
        let a = occ_exact(&Permutation::parse("12").unwrap(), &p, u128::MAX).unwrap();
        let b = occ_exact(&Permutation::parse("21").unwrap(), &p, u128::MAX).unwrap();
        prop_assert_eq!(a + b, num_rational::Ratio::from_integer(1));
        let slow = (0..p.len())
            .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| p.values()[i] > p.values()[j])
            .count() as u64;
        prop_assert_eq!(inversions(&p), slow);
    }

    #[test]
    fn grid_cdf_is_monotone(p in any_perm(50), g in 2usize..12) {
        let c = GridCdf::new(&p, g).unwrap();
        for a in 0..=g {
            for b in 0..g {
                prop_assert!(c.units(a, b) <= c.units(a, b + 1));
                prop_assert!(c.units(b, a) <= c.units(b + 1, a));
            }
        }
        prop_assert_eq!(c.units(g, g), c.denominator());
        let d = box_distance_grid(&p, 0.5, g).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn restriction_shapes(p in any_perm(30), h in 0usize..4, seed in 0usize..1000) {
        let i = seed % p.len() + 1;
        let r = restrict(&p, i, h);
        prop_assert!(r.pattern.len() <= 2 * h + 1);
        prop_assert_eq!(r.pattern.value(r.root), {
            let a = i.saturating_sub(h).max(1);
            let b = (i + h).min(p.len());
            (a..=b).filter(|&j| p.value(j) <= p.value(i)).count()
        });
        prop_assert_eq!(local_distance(&r, &r), 0.0);
        let d = local_distance(&r, &restrict(&p, i, h + 1));
        prop_assert!(d <= 2f64.powi(-(h as i32)) || d == 0.0);
    }

    #[test]
    fn polyline_hits_breakpoints(ys in prop::collection::vec(-5.0f64..5.0, 2..20)) {
        let m = ys.len() - 1;
        let pts: Vec<(f64, f64)> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (if i == m { 1.0 } else { i as f64 / m as f64 }, y))
            .collect();
        let f = Polyline::new(pts.clone()).unwrap();
        for (t, y) in pts {
            prop_assert!((f.eval(t) - y).abs() < 1e-12);
        }
    }
}
