use std::collections::BTreeSet;

use minklab::counterexamples::{union_volume, AxisBox};
use minklab::geometry::Spider;
use minklab::grid::{dilate, GridFrame, GridSet, Mode, VolumeBound};
use minklab::lab::{Model, Verdict};
use minklab::rational::{self, int, rat, Rational};
use minklab::spec::parse_spec;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn absolute_cells(g: &GridSet) -> BTreeSet<Vec<i64>> {
    let h = g.frame().spacing();
    let offset: Vec<i64> = g
        .frame()
        .anchor()
        .iter()
        .map(|a| rational::to_i128(&rational::floor_int(&(a / h))).unwrap() as i64)
        .collect();
    g.cells().iter().map(|c| c.iter().zip(&offset).map(|(&i, o)| i as i64 + o).collect()).collect()
}

fn grid_of(cells: &[(usize, usize)], n: usize) -> GridSet {
    let frame = GridFrame::new(vec![int(0), int(0)], rat(1, 8), vec![n, n]).unwrap();
    let mut g = GridSet::empty(frame, Mode::Exact).unwrap();
    for &(x, y) in cells {
        g.insert(&[x % n, y % n]).unwrap();
    }
    g
}

fn planar_spider() -> impl Strategy<Value = Spider> {
    prop::collection::vec((-4i64..=4, -4i64..=4), 2..=4).prop_filter_map("full-dimensional", |tips| {
        let tips = tips.into_iter().map(|(x, y)| vec![rat(x, 4), rat(y, 4)]).collect();
        Spider::new(vec![int(0), int(0)], tips).ok().filter(|s| s.affine_dim() == 2)
    })
}

fn bound(lo: i64, hi: i64) -> VolumeBound {
    VolumeBound::new(int(lo.min(hi)), int(lo.max(hi))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dilation_is_the_index_sumset(
        a in prop::collection::vec((0usize..12, 0usize..12), 1..20),
        b in prop::collection::vec((0usize..6, 0usize..6), 1..8),
    ) {
        let (ga, gb) = (grid_of(&a, 12), grid_of(&b, 6));
        let sum = dilate(&ga, &gb).unwrap();
        let mut expected = BTreeSet::new();
        for p in absolute_cells(&ga) {
            for q in absolute_cells(&gb) {
                expected.insert(vec![p[0] + q[0], p[1] + q[1]]);
            }
        }
        prop_assert_eq!(absolute_cells(&sum), expected);
        prop_assert_eq!(absolute_cells(&dilate(&gb, &ga).unwrap()), absolute_cells(&sum));
    }

    #[test]
    fn klee_union_matches_unit_cell_count(
        boxes in prop::collection::vec(((0i64..6, 1i64..4), (0i64..6, 1i64..4)), 1..6),
    ) {
        let mut covered = BTreeSet::new();
        let mut list = Vec::new();
        for ((x, w), (y, h)) in boxes {
            list.push(AxisBox::new(vec![int(x), int(y)], vec![int(x + w), int(y + h)]).unwrap());
            for i in x..x + w {
                for j in y..y + h {
                    covered.insert((i, j));
                }
            }
        }
        prop_assert_eq!(union_volume(&list).unwrap(), int(covered.len() as i64));
    }

    #[test]
    fn spider_grid_brackets_contain_the_exact_area(s in planar_spider(), k in 1u64..=3) {
        let m = Model::Spider(s);
        let exact = m.exact(k).unwrap().unwrap();
        let grid = m.grid(k, &rat(1, 16), 1 << 26).unwrap().unwrap();
        prop_assert!(grid.contains(&exact), "{grid:?} vs {exact}");
    }

    #[test]
    fn affine_images_scale_by_the_determinant(
        s in planar_spider(),
        m in prop::array::uniform4(-3i64..=3),
        k in 1u64..=3,
    ) {
        let det = int(m[0] * m[3] - m[1] * m[2]);
        prop_assume!(!det.is_zero());
        let text = format!(
            r#"{{"dim": 2, "kind": "affine", "matrix": [["{}", "{}"], ["{}", "{}"]], "translation": ["1/3", "-2"], "inner": {}}}"#,
            m[0], m[1], m[2], m[3], minklab::spec::SetSpec::from_spider(&s).to_json()
        );
        let image = Model::from_spec(&parse_spec(&text).unwrap()).unwrap();
        let base = Model::Spider(s).exact(k).unwrap().unwrap();
        prop_assert_eq!(image.exact(k).unwrap().unwrap(), base * det.abs());
    }

    #[test]
    fn verdicts_never_contradict(a in 0i64..10, b in 0i64..10, c in 0i64..10, e in 0i64..10) {
        let (p, q) = (bound(a, b), bound(c, e));
        let v = Verdict::compare(&p, &q);
        prop_assert_eq!(v == Verdict::CertifiedNondecreasing, q.lower >= p.upper);
        prop_assert_eq!(v == Verdict::CertifiedViolation, q.upper < p.lower);
        // Exact values compare as numbers.
        let exact = Verdict::compare(&VolumeBound::exact(int(a)), &VolumeBound::exact(int(c)));
        prop_assert_eq!(exact == Verdict::CertifiedNondecreasing, c >= a);
    }
}

#[test]
fn hull_model_is_constant_in_k() {
    let pts: Vec<Vec<Rational>> = vec![vec![int(0), int(0)], vec![int(2), int(0)], vec![rat(1, 2), int(3)]];
    let m = Model::Hull(pts);
    let v = m.exact(1).unwrap().unwrap();
    assert_eq!(v, int(3));
    for k in 2..=6 {
        assert_eq!(m.exact(k).unwrap().unwrap(), v);
    }
}
