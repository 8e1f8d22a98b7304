use cyops::corpus::corpus_get;
use cyops::frobenius::mum_flag;
use cyops::annihilator::sym_square_order;
use std::time::Instant;

#[test]
fn dbg_sym2() {
    let q = corpus_get("quintic").unwrap().to_theta_form();
    let deg = 12usize;
    let need = (11 * (deg + 2) + 16) as i64;
    let t0 = Instant::now();
    let flag = mum_flag(&q, need).unwrap();
    eprintln!("flag at {need}: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let k = sym_square_order(&flag.solutions, deg).unwrap();
    eprintln!("sym_square_order = {k}: {:?}", t1.elapsed());
}
