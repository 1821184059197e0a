use std::io::Write;

use dlgn::data::{
    encode_monks, load_csv_binary, monk2_target, monks2_generated, parity, read_idx_images, read_idx_labels,
    sample_batch, thermometer_encode, Binarizer, DatasetSpec, MONKS_ARITIES,
};
use dlgn::netarch::{group_sum, Batch};
use proptest::prelude::*;

#[test]
fn parity_is_complete_and_labeled() {
    let d = parity(6).unwrap();
    assert_eq!(d.train.rows(), 64);
    assert_eq!(d.train, d.test);
    for i in 0..64 {
        let ones = d.train.row(i).iter().filter(|&&x| x == 1.0).count();
        assert_eq!(d.train.labels[i] as usize, ones % 2);
    }
    assert!(parity(0).is_err());
}

#[test]
fn generated_monks_split_shapes() {
    let d = monks2_generated(0);
    assert_eq!((d.dim, d.classes), (17, 2));
    assert_eq!(d.test.rows(), 432);
    assert_eq!(d.train.rows(), 169);
    assert_eq!(monks2_generated(0).train, d.train);
    assert_eq!(d.dim, MONKS_ARITIES.iter().map(|&a| a as usize).sum::<usize>());
    // Exactly two attributes take their first value.
    let attrs = [1, 1, 2, 2, 3, 2];
    assert!(monk2_target(&attrs));
    assert!(!monk2_target(&[1, 1, 1, 1, 1, 1]));
    assert!(encode_monks(&[4, 1, 1, 1, 1, 1]).is_none());
}

#[test]
fn idx_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("img");
    let mut f = std::fs::File::create(&img).unwrap();
    f.write_all(&[0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 1]).unwrap();
    f.write_all(&[0, 255, 128, 127]).unwrap();
    drop(f);
    let (n, r, c, px) = read_idx_images(&img).unwrap();
    assert_eq!((n, r, c), (2, 2, 1));
    assert_eq!(px, vec![0, 255, 128, 127]);

    let lab = dir.path().join("lab");
    std::fs::write(&lab, [0, 0, 8, 1, 0, 0, 0, 3, 7, 0, 9]).unwrap();
    assert_eq!(read_idx_labels(&lab).unwrap(), vec![7, 0, 9]);

    std::fs::write(&lab, [0, 0, 8, 2, 0, 0, 0, 1, 7]).unwrap();
    assert!(read_idx_labels(&lab).is_err());
    std::fs::write(&lab, [0, 0, 8, 1, 0, 0, 0, 3, 7]).unwrap();
    assert!(read_idx_labels(&lab).is_err());
}

#[test]
fn csv_loader_finds_label_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("train.csv"), "x0,label,x1\n0,1,1\n1,0,0\n1,2,1\n").unwrap();
    std::fs::write(dir.path().join("test.csv"), "x0,label,x1\n1,1,0\n").unwrap();
    let d = load_csv_binary(dir.path()).unwrap();
    assert_eq!((d.dim, d.classes), (2, 3));
    assert_eq!(d.train.features, vec![0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
    assert_eq!(d.train.labels, vec![1, 0, 2]);
    assert_eq!(d.test.labels, vec![1]);

    std::fs::write(dir.path().join("test.csv"), "x0,label,x1\n1,1,0.5\n").unwrap();
    assert!(load_csv_binary(dir.path()).is_err());
    std::fs::write(dir.path().join("test.csv"), "x0,x1\n1,0\n").unwrap();
    assert!(load_csv_binary(dir.path()).is_err());
}

#[test]
fn dataset_specs_parse() {
    let root = std::path::Path::new("/data");
    assert_eq!(DatasetSpec::parse("parity6", root).unwrap(), DatasetSpec::Parity(6));
    assert_eq!(DatasetSpec::parse("parity:6", root).unwrap(), DatasetSpec::Parity(6));
    assert!(matches!(DatasetSpec::parse("mnist:thermo3", root).unwrap(), DatasetSpec::Mnist(_, Binarizer::Thermometer(3))));
    assert!(matches!(DatasetSpec::parse("gate:XOR", root).unwrap(), DatasetSpec::SingleGate(_)));
    assert!(DatasetSpec::parse("gate:MAYBE", root).is_err());
    assert!(DatasetSpec::parse("imagenet", root).is_err());
}

#[test]
fn sampling_is_seeded_and_full_when_large() {
    let d = parity(5).unwrap();
    let a = sample_batch(&d.train, 8, 1, 7);
    assert_eq!(a, sample_batch(&d.train, 8, 1, 7));
    assert_ne!(a, sample_batch(&d.train, 8, 1, 8));
    assert_eq!(sample_batch(&d.train, 32, 1, 0), d.train);
    assert_eq!(sample_batch(&d.train, 100, 1, 0), d.train);
}

proptest! {
    #[test]
    fn thermometer_is_monotone(x in 0.0f64..1.0, y in 0.0f64..1.0, levels in 1usize..16) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let a = thermometer_encode(&[lo], levels).unwrap();
        let b = thermometer_encode(&[hi], levels).unwrap();
        prop_assert_eq!(a.len(), levels);
        for i in 0..levels {
            prop_assert!(a[i] <= b[i]);
            if i > 0 {
                prop_assert!(a[i] <= a[i - 1]);
            }
        }
    }

    #[test]
    fn group_sum_is_permutation_equivariant(
        acts in prop::collection::vec(0.0f32..1.0, 12),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        // Shuffling within groups leaves sums alone; the class order follows the group order.
        let base = group_sum(&acts, 12, 3).unwrap();
        let within: Vec<f32> = (0..12).map(|i| acts[(i / 4) * 4 + perm[i % 4]]).collect();
        let w = group_sum(&within, 12, 3).unwrap();
        for c in 0..3 {
            prop_assert!((w[c] - base[c]).abs() < 1e-5);
        }
        let swapped: Vec<f32> = acts[8..].iter().chain(&acts[..8]).copied().collect();
        let s = group_sum(&swapped, 12, 3).unwrap();
        prop_assert_eq!(s, vec![base[2], base[0], base[1]]);
    }

    #[test]
    fn threshold_binarizer_is_strict(x in 0.0f64..1.0) {
        let mut out = Vec::new();
        Binarizer::Threshold(0.5).encode_into(x, &mut out);
        prop_assert_eq!(out, vec![if x > 0.5 { 1.0 } else { 0.0 }]);
    }
}

#[test]
fn batch_rows_slice_features() {
    let b = Batch {
        dim: 2,
        features: vec![0.0, 1.0, 1.0, 1.0],
        labels: vec![0, 1],
    };
    assert_eq!(b.row(1), &[1.0, 1.0]);
}
