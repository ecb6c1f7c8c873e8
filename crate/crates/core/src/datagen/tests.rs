use super::*;
use crate::binning::{build_bins, BinningConfig};
use crate::probability::{bsc_conditional, ConditionalPmf};

#[test]
fn noiseless_channel_copies_input() {
    let ch = Channel::Bsc { n: 3, p: 0.0 };
    for (x, y) in sample_channel(&ch, 500, 9, label::CHANNEL_TRAIN).unwrap() {
        assert_eq!(x, y);
    }
}

#[test]
fn same_seed_same_sequence() {
    let ch = Channel::Bsc { n: 2, p: 0.25 };
    let a = sample_channel(&ch, 10_000, 3, label::CHANNEL_TRAIN).unwrap();
    let b = sample_channel(&ch, 10_000, 3, label::CHANNEL_TRAIN).unwrap();
    assert_eq!(a, b);
    let c = sample_channel(&ch, 10_000, 4, label::CHANNEL_TRAIN).unwrap();
    assert_ne!(a, c);
}

#[test]
fn train_and_test_streams_differ() {
    let ch = Channel::Bsc { n: 2, p: 0.25 };
    let a = sample_channel(&ch, 1000, 3, label::CHANNEL_TRAIN).unwrap();
    let b = sample_channel(&ch, 1000, 3, label::CHANNEL_TEST).unwrap();
    assert_ne!(a, b);
}

#[test]
fn empirical_crossover_concentrates() {
    let ch = Channel::Bsc { n: 1, p: 0.25 };
    let pairs = sample_channel(&ch, 1 << 16, 5, label::CHANNEL_TRAIN).unwrap();
    let flips = pairs.iter().filter(|&&(x, y)| x != y).count();
    let rate = flips as f64 / pairs.len() as f64;
    assert!((rate - 0.25).abs() < 0.01, "crossover {rate}");
}

#[test]
fn table_channel_matches_bsc_statistics() {
    let table = Channel::Table(bsc_conditional(1, 0.25).unwrap());
    let pairs = sample_channel(&table, 1 << 16, 5, label::CHANNEL_TRAIN).unwrap();
    let flips = pairs.iter().filter(|&&(x, y)| x != y).count();
    let rate = flips as f64 / pairs.len() as f64;
    assert!((rate - 0.25).abs() < 0.01, "crossover {rate}");
}

fn example_bins(n: usize, p: f64, k_bits: u16, l_bits: u16) -> crate::binning::Binning {
    let qhat = bsc_conditional(n, p).unwrap();
    build_bins(
        &qhat,
        &BinningConfig {
            beta: 1,
            k_size: 1 << k_bits,
            l_size: 1 << l_bits,
            allow_empty_k: true,
            allow_empty_l: true,
        },
    )
    .unwrap()
}

#[test]
fn attach_respects_bins() {
    let bins = example_bins(2, 0.25, 4, 4);
    let ch = Channel::Bsc { n: 2, p: 0.25 };
    let pairs = sample_channel(&ch, 5000, 7, label::CHANNEL_TRAIN).unwrap();
    let ds = attach_randomness(&pairs, &bins, 7).unwrap();
    assert_eq!(ds.header.role, Role::Train);
    assert_eq!(ds.header.nr0_bits, 4);
    for r in &ds.records {
        let b = bins.output_bins().bin_of(u64::from(r.y));
        let kr = bins.k_bins().range(r.x as usize, b);
        assert!(kr.contains(&r.k));
        let lr = bins.l_bins().range(r.x as usize, b, 0);
        assert!(lr.contains(&r.l));
    }
    // The channel pairs themselves are untouched.
    assert_eq!(ds.pairs(), pairs);
}

#[test]
fn attach_uniform_within_bin() {
    // A bin of size 4 hit many times: each index appears with frequency
    // 0.25 +- 0.02.
    let bins = example_bins(1, 0.25, 2, 2);
    let pairs = vec![(0u64, 0u64); 1 << 14];
    let ds = attach_randomness(&pairs, &bins, 11).unwrap();
    let kr = bins.k_bins().range(0, 0);
    assert_eq!(kr.end - kr.start, 3); // 0.75 * 4 rounds to 3
    let lr = bins.l_bins().range(0, 0, 0);
    assert_eq!(lr.end - lr.start, 4);
    let mut counts = vec![0usize; 4];
    for r in &ds.records {
        counts[r.l as usize] += 1;
    }
    for idx in 0..4 {
        let f = counts[idx] as f64 / ds.records.len() as f64;
        assert!((f - 0.25).abs() < 0.02, "l={idx} freq {f}");
    }
}

#[test]
fn attach_rejects_empty_l_bin() {
    // Qhat gives y=1 zero probability under x=0; with empty L-bins allowed
    // the pair (0,1) has no L-range, so attaching it must fail.
    let qhat = ConditionalPmf::new(1, vec![1.0, 0.0, 0.5, 0.5]).unwrap();
    let bins = build_bins(
        &qhat,
        &BinningConfig {
            beta: 2,
            k_size: 2,
            l_size: 4,
            allow_empty_k: false,
            allow_empty_l: true,
        },
    )
    .unwrap();
    let err = attach_randomness(&[(0, 1)], &bins, 1).unwrap_err();
    assert!(matches!(
        err,
        DataError::EmptyLBinForSample { x: 0, y: 1 }
    ));
}

#[test]
fn attach_rejects_empty_k_bin() {
    let qhat = ConditionalPmf::new(1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let bins = build_bins(
        &qhat,
        &BinningConfig {
            beta: 1,
            k_size: 2,
            l_size: 2,
            allow_empty_k: true,
            allow_empty_l: true,
        },
    )
    .unwrap();
    let err = attach_randomness(&[(0, 1)], &bins, 1).unwrap_err();
    assert!(matches!(err, DataError::EmptyKBinForSample { x: 0, y: 1 }));
}

#[test]
fn test_set_degenerate_alphabets() {
    let ch = Channel::Bsc { n: 2, p: 0.25 };
    let ds = make_test_set(&ch, 300, 0, 3, 9).unwrap();
    assert_eq!(ds.header.role, Role::Test);
    assert!(ds.records.iter().all(|r| r.k == 0));
    assert!(ds.records.iter().all(|r| r.l < 8));
}

#[test]
fn test_set_k_uniform_globally() {
    let ch = Channel::Bsc { n: 1, p: 0.25 };
    let ds = make_test_set(&ch, 1 << 16, 4, 2, 13).unwrap();
    let mut counts = vec![0usize; 16];
    for r in &ds.records {
        counts[r.k as usize] += 1;
    }
    for (k, &c) in counts.iter().enumerate() {
        let f = c as f64 / ds.records.len() as f64;
        assert!((f - 1.0 / 16.0).abs() < 0.02, "k={k} freq {f}");
    }
}

#[test]
fn rdfc_round_trip() {
    let ch = Channel::Bsc { n: 3, p: 0.11 };
    let ds = make_test_set(&ch, 1000, 5, 7, 21).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.rdfc");
    ds.save(&path).unwrap();
    let back = Dataset::load(&path).unwrap();
    assert_eq!(ds, back);
}

#[test]
fn rdfc_rejects_corruption() {
    let ch = Channel::Bsc { n: 1, p: 0.25 };
    let ds = make_test_set(&ch, 10, 1, 1, 0).unwrap();
    let bytes = ds.to_bytes();
    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'x';
    assert!(Dataset::from_bytes(&bad_magic).is_err());
    let mut bad_role = bytes.clone();
    bad_role[6] = 9;
    assert!(Dataset::from_bytes(&bad_role).is_err());
    let mut truncated = bytes.clone();
    truncated.truncate(bytes.len() - 1);
    assert!(Dataset::from_bytes(&truncated).is_err());
}

#[test]
fn conditional_law_preserved_by_attachment() {
    // For fixed x, the empirical law of y among attached records equals the
    // law among the raw channel samples (they are the same pairs).
    let ch = Channel::Bsc { n: 1, p: 0.25 };
    let pairs = sample_channel(&ch, 1 << 14, 17, label::CHANNEL_TRAIN).unwrap();
    let bins = example_bins(1, 0.25, 3, 3);
    let ds = attach_randomness(&pairs, &bins, 17).unwrap();
    let mut law = [[0usize; 2]; 2];
    for r in &ds.records {
        law[r.x as usize][r.y as usize] += 1;
    }
    let mut law_pairs = [[0usize; 2]; 2];
    for &(x, y) in &pairs {
        law_pairs[x as usize][y as usize] += 1;
    }
    assert_eq!(law, law_pairs);
}
