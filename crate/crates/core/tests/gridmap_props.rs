use floorwalk::gridmap::{
    binarize_mask, from_bundle_str, load_bundle, save_bundle, to_bundle_string, BinarizeParams,
    BuildingMap, GrayMask,
};
use floorwalk::synth::two_floor_building;
use proptest::prelude::*;

fn mask_strategy() -> impl Strategy<Value = (usize, usize, Vec<u8>)> {
    (1usize..40, 1usize..40).prop_flat_map(|(w, h)| {
        (
            Just(w),
            Just(h),
            proptest::collection::vec(any::<u8>(), w * h),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn output_shape_is_requested_shape((w, h, px) in mask_strategy(), r in 1usize..40, c in 1usize..40) {
        prop_assume!(r <= h && c <= w);
        let g = binarize_mask(GrayMask::new(w, h, &px).unwrap(), &BinarizeParams::new(r, c)).unwrap();
        prop_assert_eq!((g.rows(), g.cols()), (r, c));
    }

    #[test]
    fn darkening_never_frees_a_cell(
        (w, h, px) in mask_strategy(), r in 1usize..40, c in 1usize..40,
        darken in proptest::collection::vec(any::<u8>(), 1600),
        threshold in 0.0f64..1.0,
    ) {
        prop_assume!(r <= h && c <= w);
        let darker: Vec<u8> = px.iter().zip(&darken).map(|(&p, &d)| p.saturating_sub(d)).collect();
        let params = BinarizeParams::new(r, c).with_threshold(threshold);
        let before = binarize_mask(GrayMask::new(w, h, &px).unwrap(), &params).unwrap();
        let after = binarize_mask(GrayMask::new(w, h, &darker).unwrap(), &params).unwrap();
        for (b, a) in before.cells().iter().zip(after.cells()) {
            prop_assert!(*b || !*a, "a blocked cell became free");
        }
    }

    #[test]
    fn bundle_round_trip(rows in 4usize..25, cols in 4usize..25, density in 0.0f64..0.4, seed: u64) {
        let m = two_floor_building::<f64>((rows, cols), (rows, cols), density, seed);
        let text = to_bundle_string(&m);
        let back: BuildingMap<f64> = from_bundle_str(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(to_bundle_string(&back), text);
    }
}

#[test]
fn saved_bundle_loads_back_equal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mall.json");
    let m = two_floor_building::<f64>((30, 40), (30, 40), 0.3, 11);
    save_bundle(&m, &path).unwrap();
    let back: BuildingMap<f64> = load_bundle(&path).unwrap();
    assert_eq!(back, m);
    // Overwriting leaves only the bundle itself in the directory.
    save_bundle(&back, &path).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn f32_bundle_round_trip() {
    let m = two_floor_building::<f32>((12, 12), (12, 12), 0.2, 5);
    let back: BuildingMap<f32> = from_bundle_str(&to_bundle_string(&m)).unwrap();
    assert_eq!(back, m);
}
