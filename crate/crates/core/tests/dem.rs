mod common;

use std::collections::BTreeSet;

use common::*;
use mdgi_core::dem::*;
use mdgi_core::error::{Error, ParseError};
use proptest::prelude::*;

#[test]
fn small_esri_grid() {
    let text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n1 2\n3 4\n";
    let dem = parse_esri_ascii(text, &Quantization::default()).unwrap();
    assert_eq!((dem.cell_count(), dem.volume()), (4, 10));
    let holed = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\nNODATA_value -1\n1 -1\n3 4\n";
    assert_eq!(parse_esri_ascii(holed, &Quantization::default()).unwrap().cell_count(), 3);
    let missing = "ncols 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n1 2\n3 4\n";
    assert!(matches!(
        parse_esri_ascii(missing, &Quantization::default()),
        Err(Error::Parse(ParseError::MalformedHeader { .. }))
    ));
}

#[test]
fn quantization_examples() {
    let q = Quantization::new(1.0, 0.0).unwrap();
    assert_eq!(q.apply(10.0).unwrap(), 11);
    assert_eq!(q.apply(0.0).unwrap(), 1);
    assert_eq!(q.apply(-5.0).unwrap(), 1);
    assert!(matches!(Quantization::new(0.0, 0.0), Err(Error::NonPositiveStep(_))));
}

#[test]
fn diagonal_lines_of_a_square() {
    let dem = Dem::from_grid(&[vec![1; 3], vec![1; 3], vec![1; 3]]).unwrap();
    let lens: Vec<usize> = scan_lines(&dem, Direction::DiagDown)
        .iter()
        .map(|l| l.segments[0].len())
        .collect();
    assert_eq!(lens, vec![1, 2, 3, 2, 1]);
    let rows = scan_lines(&dem, Direction::Row);
    assert_eq!(rows.len(), 3);
}

#[test]
fn two_row_reflection_family_has_four_members() {
    let dem = Dem::from_grid(&[vec![1, 2, 3], vec![4, 5, 7]]).unwrap();
    let mut seen = BTreeSet::new();
    for bits in 0..4usize {
        let rows = (0..2).filter(|y| bits >> y & 1 == 1).collect();
        seen.insert(reflect_rows(&dem, &rows).unwrap().rows());
    }
    assert_eq!(seen.len(), 4);
}

proptest! {
    #[test]
    fn esri_round_trip(dem in arb_dem(10, 40)) {
        let text = write_esri_ascii(&dem, None);
        prop_assert_eq!(parse_esri_ascii(&text, &Quantization::default()).unwrap(), dem);
    }

    #[test]
    fn csv_round_trip(dem in arb_dem(10, 40)) {
        let text = write_grid_csv(&dem);
        prop_assert_eq!(parse_grid_csv(&text, &Quantization::default()).unwrap(), dem);
    }

    #[test]
    fn scan_lines_partition_the_domain(dem in arb_dem(10, 5), d in 0usize..4) {
        let direction = Direction::ALL[d];
        let mut cells = BTreeSet::new();
        for line in scan_lines(&dem, direction) {
            for seg in &line.segments {
                prop_assert!(!seg.is_empty());
                for ((x, y), &v) in seg.cells(direction).zip(&seg.values) {
                    prop_assert_eq!(dem.get(x, y), Some(v));
                    prop_assert!(cells.insert((x, y)));
                }
            }
        }
        prop_assert_eq!(cells.len(), dem.cell_count());
    }

    #[test]
    fn reflection_is_a_volume_preserving_involution(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dem = random_interval_dem(&mut rng, 7, 5, 9);
        let rows: BTreeSet<usize> = (0..5).filter(|y| seed >> y & 1 == 1).collect();
        let once = reflect_rows(&dem, &rows).unwrap();
        prop_assert_eq!(once.volume(), dem.volume());
        prop_assert_eq!(reflect_rows(&once, &rows).unwrap(), dem);
    }

    #[test]
    fn scaling_multiplies_the_volume(dem in arb_dem(8, 20), k in 1u64..9) {
        let scaled = scale_heights(&dem, k).unwrap();
        prop_assert_eq!(scaled.volume(), k * dem.volume());
        prop_assert_eq!(scaled.max_elevation() as u64, k * dem.max_elevation() as u64);
    }
}

#[test]
fn scaling_rejects_zero_and_overflow() {
    let dem = Dem::from_grid(&[vec![1, 2, 1]]).unwrap();
    assert!(matches!(scale_heights(&dem, 0), Err(Error::InvalidScale(0))));
    assert_eq!(scale_heights(&dem, 1).unwrap(), dem);
    let tall = Dem::from_grid(&[vec![u32::MAX / 2 + 1]]).unwrap();
    assert!(matches!(scale_heights(&tall, 2), Err(Error::ElevationOverflow { .. })));
}
