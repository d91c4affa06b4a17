//! Values computed independently of this crate (closed forms evaluated in
//! double precision by hand or with a separate script) and frozen here.

use macko::density::{crossover_density, density_at_effd, expected_pad_count};
use macko::exec::warp_prefix_sum;
use macko::perf::{predict_speedup, VectorTraffic};
use macko::{
    ci_mv, effd, pack_deltas, DeltaWidth, DeviceProfile, Format, FormatCostModel, TrafficReport,
};

const N: usize = 12288;

fn model(f: Format) -> FormatCostModel {
    FormatCostModel::new(f)
}

#[test]
fn anchor_effective_densities() {
    let cases = [
        (Format::Csr32, 0.5, 1.5),
        (Format::Csr16, 0.5, 1.0),
        (Format::Bitmask, 0.5, 0.5625),
        (Format::MackoBest, 0.5, 0.625),
        (Format::MackoWorst, 0.5, 0.6640625),
        (Format::MackoExpected, 1.0, 1.25),
        (Format::TiledCsl, 0.5, 1.00390625),
    ];
    for (f, d, want) in cases {
        let got = effd(&model(f), d, N, N).unwrap();
        assert!((got - want).abs() < 1e-12, "{f} at {d}: {got} vs {want}");
    }
    // (1 - 0.5)^16 = 2^-16; expected = 0.5 / (1 - 2^-16) * 1.25
    let e = effd(&model(Format::MackoExpected), 0.5, N, N).unwrap();
    assert!((e - 0.625009536888685).abs() < 1e-12, "{e}");
    // d -> 0 limit is 2^-4 * 1.25
    let e = effd(&model(Format::MackoExpected), 0.0, N, N).unwrap();
    assert_eq!(e, 0.078125);
}

#[test]
fn crossover_points() {
    let expected = model(Format::MackoExpected);
    let bm = crossover_density(&expected, &model(Format::Bitmask), N, N, 0.05, 1.0).unwrap().unwrap();
    assert!((bm - 0.233061).abs() < 1e-6, "{bm}");
    // a second, lower touching point exists below 0.05
    let low = crossover_density(&model(Format::Bitmask), &expected, N, N, 0.0, 0.05).unwrap();
    assert!(low.is_some_and(|d| (d - 0.04655).abs() < 1e-4), "{low:?}");

    let q8 = density_at_effd(&expected, 0.5, N, N, 0.0, 1.0).unwrap().unwrap();
    assert!((q8 - 0.399887).abs() < 1e-6, "{q8}");
    let parity = density_at_effd(&expected, 1.0, N, N, 0.0, 1.0).unwrap().unwrap();
    assert!((parity - 0.8).abs() < 1e-9, "{parity}");
    let csr = density_at_effd(&model(Format::Csr32), 0.5, N, N, 0.0, 1.0).unwrap().unwrap();
    assert!((csr - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn compute_intensity() {
    assert!((ci_mv(N, N) - 0.999837).abs() < 1e-6);
}

#[test]
fn expected_pads_at_half_density() {
    // R C d z / (1 - z) with z = 2^-16
    let z = 1.52587890625e-05;
    let want = 1024.0 * 8192.0 * 0.5 * z / (1.0 - z);
    let got = expected_pad_count(1024, 8192, 0.5, DeltaWidth::FOUR).unwrap();
    assert!((got - want).abs() < 1e-9 * want);
    assert!((got - 64.00097657).abs() < 1e-6);
}

#[test]
fn packing_layout() {
    assert_eq!(pack_deltas(&[2, 3], DeltaWidth::FOUR).unwrap(), vec![0x21]);
    assert_eq!(pack_deltas(&[1, 2, 3, 4, 4, 3, 2, 1], DeltaWidth::TWO).unwrap(), vec![0b11_10_01_00, 0b00_01_10_11]);
    assert_eq!(pack_deltas(&[1, 2, 1, 2, 2, 2, 1, 1, 2], DeltaWidth::ONE).unwrap(), vec![0b0011_1010, 0b1]);
}

#[test]
fn scan_example() {
    let mut input = [0u32; 32];
    input[..8].copy_from_slice(&[3, 1, 4, 1, 5, 9, 2, 6]);
    let out = warp_prefix_sum(&input);
    assert_eq!(&out[..9], &[0, 3, 4, 8, 9, 14, 23, 25, 31]);
    assert!(out[9..].iter().all(|&x| x == 31));
}

#[test]
fn best_case_speedup_with_row_pointers() {
    // no padding, half the entries stored, row pointers and vectors charged
    let cells = N * N;
    let macko = TrafficReport::macko(N, N, cells / 2, cells / 2, DeltaWidth::FOUR, VectorTraffic::Once);
    let dense = TrafficReport::dense(N, N, VectorTraffic::Once);
    let s = predict_speedup(&macko, &dense, &DeviceProfile::rtx4090());
    assert!((s - 1.59943).abs() < 1e-5, "{s}");
    assert_eq!(dense.bytes_matrix, 301_989_888);
}
