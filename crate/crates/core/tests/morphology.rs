mod common;

use common::*;
use mdgi_core::dem::{Dem, Direction};
use mdgi_core::morphology::{
    dilate_line_streaming, erode_line_streaming, multiscale_open, nse, open, open_segments, NamedSe,
    StructuringElement,
};
use proptest::prelude::*;

fn le(a: &Dem, b: &Dem) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| x <= y)
}

proptest! {
    #[test]
    fn openings_are_filters(dem in arb_dem(9, 8), pick in 0usize..5, n in 1usize..4) {
        let se = NamedSe::ALL[pick].scaled(n);
        let once = open(&dem, &se);
        prop_assert!(le(&once, &dem));
        prop_assert_eq!(open(&once, &se), once);
    }

    #[test]
    fn openings_are_increasing(dem in arb_dem(8, 8), cut in 1u32..8, pick in 0usize..5) {
        let lower: Vec<Option<u32>> = dem
            .rows()
            .concat()
            .into_iter()
            .map(|c| c.map(|v| v.min(cut)))
            .collect();
        let lower = Dem::from_cells(dem.width(), dem.height(), lower).unwrap();
        let se = NamedSe::ALL[pick].element();
        prop_assert!(le(&open(&lower, &se), &open(&dem, &se)));
    }

    #[test]
    fn larger_openings_absorb_smaller(dem in arb_dem(10, 8), pick in 0usize..5, m in 0usize..4, n in 0usize..4) {
        let se = NamedSe::ALL[pick].element();
        let chained = multiscale_open(&multiscale_open(&dem, &se, m), &se, n);
        prop_assert_eq!(chained, multiscale_open(&dem, &se, m.max(n)));
    }

    #[test]
    fn operators_match_the_definition(dem in arb_dem(9, 6), pick in 0usize..5, n in 1usize..3) {
        let se = NamedSe::ALL[pick].scaled(n);
        let got = open(&dem, &se);
        prop_assert_eq!(got.values(), &naive_open(&dem, se.offsets())[..]);
    }

    #[test]
    fn streaming_matches_windows(values in prop::collection::vec(0u32..50, 0..40), r in 0usize..6) {
        let w = 2 * r + 1;
        prop_assert_eq!(erode_line_streaming(&values, w), naive_window_min(&values, w));
        prop_assert_eq!(dilate_line_streaming(&values, w), naive_window_max(&values, w));
    }

    #[test]
    fn even_segments_match_the_definition(dem in arb_dem(9, 6), len in 1usize..7, d in 0usize..4) {
        let direction = Direction::ALL[d];
        let (dx, dy) = direction.step();
        let got = open_segments(&dem, direction, len);
        // Opening by a segment of `len` cells: max over the windows containing
        // each cell of the window minimum.
        let mut want = vec![0u32; dem.width() * dem.height()];
        for y in 0..dem.height() as i64 {
            for x in 0..dem.width() as i64 {
                if !dem.is_present(x as usize, y as usize) {
                    continue;
                }
                let best = (0..len as i64)
                    .map(|s| {
                        (0..len as i64)
                            .map(|k| at(&dem, x + (k - s) * dx as i64, y + (k - s) * dy as i64))
                            .min()
                            .unwrap()
                    })
                    .max()
                    .unwrap();
                want[y as usize * dem.width() + x as usize] = best;
            }
        }
        prop_assert_eq!(got.values(), &want[..]);
    }
}

#[test]
fn minkowski_sums_of_named_elements() {
    for se in NamedSe::ALL {
        let e = se.element();
        for n in 0..4 {
            assert_eq!(nse(&e, n), se.scaled(n));
        }
    }
    let b4 = nse(&NamedSe::B4.element(), 2);
    assert_eq!(b4.offsets().len(), 5);
    assert_eq!(nse(&NamedSe::B.element(), 1).offsets().len(), 9);
}

#[test]
fn general_elements_use_the_definition() {
    let se = StructuringElement::new([(0, 0), (1, 1), (-1, -1), (2, 0), (-2, 0)]).unwrap();
    let dem = Dem::from_grid(&[vec![3, 1, 4, 1], vec![5, 9, 2, 6], vec![5, 3, 5, 8]]).unwrap();
    let got = open(&dem, &se);
    assert_eq!(got.values(), &naive_open(&dem, se.offsets())[..]);
}
