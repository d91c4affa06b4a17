//! Library-level path from a Matrix Market file to a product: parse, encode,
//! serialize, reload and multiply with every executor.

use macko::density::{gen_random_macko, measured_effd};
use macko::io::{read_macko, read_matrix_market, write_macko, write_matrix_market};
use macko::perf::{spmv_traffic, MatrixRef, VectorTraffic};
use macko::{
    csr_from_dense, csr_spmv, dense_mv, effd, gen_random_with, gen_vector, macko_from_csr, reference_spmv,
    warp_spmv, Format, FormatCostModel, MackoParams, ValueMode, WarpConfig,
};

#[test]
fn matrix_market_to_product() {
    let source = gen_random_with(70, 333, 0.35, 17, ValueMode::Integer).unwrap();
    let mut text = Vec::new();
    write_matrix_market(&source, &mut text).unwrap();
    let dense = read_matrix_market(text.as_slice()).unwrap();
    assert_eq!(dense, source);

    for b in [1u8, 2, 4, 8] {
        let csr = csr_from_dense(&dense);
        let m = macko_from_csr(&csr, MackoParams::new(b).unwrap()).unwrap();
        let mut bytes = Vec::new();
        write_macko(&m, &mut bytes).unwrap();
        let back = read_macko(bytes.as_slice()).unwrap();
        assert_eq!(back, m);

        let v = gen_vector(333, b as u64, ValueMode::Integer);
        let want = dense_mv(&dense, &v).unwrap();
        assert_eq!(reference_spmv(&back, &v).unwrap(), want);
        assert_eq!(warp_spmv(&back, &v, WarpConfig::default()).unwrap(), want);
        assert_eq!(csr_spmv(&csr, &v).unwrap(), want);
    }
}

#[test]
fn measured_effd_tracks_model() {
    // random matrices sit between best and worst case and near the expectation
    let (r, c) = (512, 4096);
    for b in [1u8, 2, 4, 8] {
        let p = MackoParams::new(b).unwrap();
        for d in [0.05, 0.2, 0.5, 0.9] {
            let m = gen_random_macko(r, c, d, 1, ValueMode::Float, p).unwrap();
            let actual_d = m.nnz() as f64 / (r * c) as f64;
            let at = |f| effd(&FormatCostModel::new(f).with_delta_width(p.delta_width()), actual_d, r, c).unwrap();
            let rp = 32.0 * (r as f64 + 1.0) / (r as f64 * c as f64 * 16.0);
            let measured = measured_effd(&m) - rp;
            assert!(at(Format::MackoBest) <= measured + 1e-12, "b={b} d={d}");
            assert!(measured <= at(Format::MackoWorst) + 1e-12, "b={b} d={d}");
            let rel = (measured - at(Format::MackoExpected)).abs() / at(Format::MackoExpected);
            assert!(rel < 0.01, "b={b} d={d}: {measured} vs {}", at(Format::MackoExpected));
        }
    }
}

#[test]
fn traffic_matches_measured_effd() {
    let m = gen_random_macko(300, 2000, 0.4, 3, ValueMode::Float, MackoParams::default()).unwrap();
    let t = spmv_traffic(MatrixRef::Macko(&m), VectorTraffic::Once);
    let ratio = t.bytes_matrix as f64 / (300.0 * 2000.0 * 2.0);
    // packed deltas are charged in whole bytes
    assert!((ratio - measured_effd(&m)).abs() < 1.0 / (300.0 * 2000.0));
    let per_entry = spmv_traffic(MatrixRef::Macko(&m), VectorTraffic::PerEntry);
    assert_eq!(per_entry.bytes_vector_in, 2 * m.pad_nnz() as u64);
}
