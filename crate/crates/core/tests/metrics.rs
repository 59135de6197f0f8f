use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use svgcore::grouping::{Decomposition, SeparableVar};
use svgcore::metrics::{nmi, rho_split, Partition};
use svgcore::problems::{build_problem, Function};

fn from_labels(labels: &[usize]) -> Partition {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    Partition::new(labels.len(), groups.into_values().collect()).unwrap()
}

/// Mutual information over the sum of entropies, from pair counts; the
/// textbook form rather than the confusion-matrix one.
fn oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let count = |pred: &dyn Fn(usize) -> bool| (0..a.len()).filter(|&i| pred(i)).count() as f64 / n;
    let la: Vec<usize> = { let mut v = a.to_vec(); v.sort_unstable(); v.dedup(); v };
    let lb: Vec<usize> = { let mut v = b.to_vec(); v.sort_unstable(); v.dedup(); v };
    let mut mi = 0.0;
    for &x in &la {
        for &y in &lb {
            let pxy = count(&|i| a[i] == x && b[i] == y);
            if pxy > 0.0 {
                mi += pxy * (pxy / (count(&|i| a[i] == x) * count(&|i| b[i] == y))).log2();
            }
        }
    }
    let h = |ls: &[usize], v: &[usize]| -> f64 {
        ls.iter().map(|&x| { let p = count(&|i| v[i] == x); -p * p.log2() }).sum()
    };
    let den = h(&la, a) + h(&lb, b);
    if den == 0.0 { 100.0 } else { 200.0 * mi / den }
}

fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1usize..=6).prop_flat_map(move |k| prop::collection::vec(0..k, n))
}

proptest! {
    #[test]
    fn nmi_matches_entropy_oracle(a in labels(15), b in labels(15)) {
        let got = nmi(&from_labels(&a), &from_labels(&b), 15).unwrap();
        assert_abs_diff_eq!(got, oracle(&a, &b), epsilon = 1e-9);
    }

    #[test]
    fn nmi_is_symmetric_and_bounded(a in labels(12), b in labels(12)) {
        let (pa, pb) = (from_labels(&a), from_labels(&b));
        let ab = nmi(&pa, &pb, 12).unwrap();
        prop_assert!((0.0..=100.0).contains(&ab));
        assert_abs_diff_eq!(ab, nmi(&pb, &pa, 12).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn nmi_ignores_label_names(a in labels(12), b in labels(12), shift in 1usize..50) {
        let renamed: Vec<usize> = a.iter().map(|l| (l + shift) * 7).collect();
        let x = nmi(&from_labels(&a), &from_labels(&b), 12).unwrap();
        let y = nmi(&from_labels(&renamed), &from_labels(&b), 12).unwrap();
        assert_abs_diff_eq!(x, y, epsilon = 1e-12);
    }

    #[test]
    fn self_agreement_is_perfect(a in labels(10)) {
        let p = from_labels(&a);
        prop_assert_eq!(nmi(&p, &p, 10).unwrap(), 100.0);
    }

    #[test]
    fn labels_round_trip(a in labels(10)) {
        let p = from_labels(&a);
        prop_assert_eq!(from_labels(&p.labels()), p);
    }

    #[test]
    fn restriction_keeps_a_partition(a in labels(12), mask in prop::collection::vec(any::<bool>(), 12)) {
        let subset: Vec<usize> = (0..12).filter(|&i| mask[i]).collect();
        let r = from_labels(&a).restrict(&subset);
        prop_assert!(Partition::new(subset.len(), r.groups().to_vec()).is_ok());
    }

    #[test]
    fn ground_truth_scores_perfectly(f in 1u8..=21, seed in 0u64..1000) {
        let p = build_problem(f, 40, 10, seed).unwrap();
        let gt = p.ground_truth();
        let d = Decomposition {
            n: 40,
            seps: gt.separable.iter().map(|&index| SeparableVar { index, optimum: None }).collect(),
            nonseps: gt.groups.clone(),
            cv: p.lower().to_vec(),
            fes_used: 0,
            exhausted: false,
        };
        let (rho1, rho2) = rho_split(&gt, &d).unwrap();
        prop_assert!(rho1.is_none_or(|v| v == 100.0));
        prop_assert!(rho2.is_none_or(|v| v == 100.0));
        prop_assert!(rho1.is_some() || rho2.is_some());
    }
}

#[test]
fn invalid_partitions_rejected() {
    assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
    assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
    assert!(Partition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
    assert!(Partition::new(3, vec![vec![0, 1, 3]]).is_err());
}

#[test]
fn lumping_everything_scores_zero_on_separables() {
    let p = build_problem(1, 30, 10, 0).unwrap();
    let d = Decomposition { n: 30, seps: vec![], nonseps: vec![(0..30).collect()], cv: vec![0.0; 30], fes_used: 0, exhausted: false };
    assert_eq!(rho_split(&p.ground_truth(), &d).unwrap(), (Some(0.0), None));
}
