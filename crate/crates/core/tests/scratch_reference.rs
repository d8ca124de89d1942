//! Build-time reference computation (temporary).

use num_bigint::BigInt;
use num_rational::BigRational;
use shiftpress_core::language::ResourceBudget;
use shiftpress_core::samples;
use shiftpress_core::transfer::ColumnTransferMatrix;

#[test]
#[ignore]
fn compute_hard_square_references() {
    let spec = samples::hard_squares();
    let zero = vec![BigRational::from_integer(BigInt::from(0)); 2];
    let budget = ResourceBudget::default();

    let mut logs = Vec::new();
    for w in 11u32..=14 {
        let mut ctm = ColumnTransferMatrix::from_nn_spec(&spec, &zero, w, &budget).unwrap();
        ctm.trim_to_essential();
        let t0 = std::time::Instant::now();
        let (lb, certified) = ctm.spectral_log_bounds(256, 160).unwrap();
        println!(
            "w={w}: states={} log_lambda in {} width={:.3e} certified={certified} ({:?})",
            ctm.state_count(),
            lb.to_decimal_string(20),
            lb.width_f64(),
            t0.elapsed()
        );
        logs.push((w, lb));
    }
    for pair in logs.windows(2) {
        let (w1, a) = &pair[0];
        let (w2, b) = &pair[1];
        let diff = b.sub(a);
        println!(
            "diff log lambda_{w2} - log lambda_{w1}: {} (mid {:.16})",
            diff.to_decimal_string(18),
            diff.midpoint_f64()
        );
    }

    let ctm14 = ColumnTransferMatrix::from_nn_spec(&spec, &zero, 14, &budget).unwrap();
    let t0 = std::time::Instant::now();
    let z = ctm14.grid_partition(14, 256);
    let lnz = shiftpress_core::rigor::ln_interval(&z, 128).unwrap();
    println!("ln N(14x14) = {:.12} ({:?})", lnz.midpoint_f64(), t0.elapsed());
    println!(
        "upper = {:.6}, lower = {:.6}, width = {:.6}",
        lnz.midpoint_f64() / 196.0,
        lnz.midpoint_f64() / 256.0,
        lnz.midpoint_f64() / 196.0 - lnz.midpoint_f64() / 256.0
    );
}
