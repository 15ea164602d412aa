use dwr2::compile::*;
use dwr2::oracle::{oracle_verify, OracleMode};
use dwr2::tableau::verify_dwr;
use dwr2::PauliString;

fn zs(w: usize) -> PauliString {
    "Z".repeat(w).parse().unwrap()
}

fn main() {
    println!("== constant-space ==");
    for w in 3..=12 {
        let c = compile_constant_space(w).unwrap();
        let rep = verify_dwr(&c, &zs(w)).unwrap();
        let m = c.metrics();
        println!(
            "w={w}: A={} D={} V={} ok={} mask_terms={} ops={}",
            m.a,
            m.d,
            m.v,
            rep.ok,
            rep.sign_mask.terms().len(),
            c.op_count()
        );
        assert_eq!(rep.sign_mask, predicted_sign_mask(&c), "mask w={w}");
    }
    println!("== depth5 ==");
    for w in 3..=12 {
        let c = compile_depth5(w).unwrap();
        let rep = verify_dwr(&c, &zs(w)).unwrap();
        let m = c.metrics();
        println!("w={w}: A={} D={} ok={} ops={}", m.a, m.d, rep.ok, c.op_count());
        assert_eq!(rep.sign_mask, predicted_sign_mask(&c));
    }
    println!("== depth6 ==");
    for w in 3..=12 {
        let c = compile_depth6(w).unwrap();
        let rep = verify_dwr(&c, &zs(w)).unwrap();
        let m = c.metrics();
        println!("w={w}: A={} D={} ok={} ops={}", m.a, m.d, rep.ok, c.op_count());
        assert_eq!(rep.sign_mask, predicted_sign_mask(&c));
    }
    println!("== interpolating depth table D(w,a) ==");
    print!("w\\a ");
    for a in 2..=12 {
        print!("{a:>4}");
    }
    println!();
    for w in 3..=20 {
        print!("{w:>3} ");
        for a in 2..=w.min(12) {
            let c = compile_interpolating(w, a).unwrap();
            let rep = verify_dwr(&c, &zs(w)).unwrap();
            assert!(rep.ok, "verify failed w={w} a={a}: {:?}", rep.diagnosis);
            assert_eq!(rep.sign_mask, predicted_sign_mask(&c), "mask w={w} a={a}");
            print!("{:>4}", c.depth());
        }
        println!();
    }
    println!("== exhaustive oracle spot checks ==");
    for (name, c) in [
        ("depth5 w=3", compile_depth5(3).unwrap()),
        ("depth5 w=4", compile_depth5(4).unwrap()),
        ("depth6 w=4", compile_depth6(4).unwrap()),
        ("depth6 w=5", compile_depth6(5).unwrap()),
        ("const w=5", compile_constant_space(5).unwrap()),
        ("const w=6", compile_constant_space(6).unwrap()),
        ("interp 5,3", compile_interpolating(5, 3).unwrap()),
        ("interp 6,2", compile_interpolating(6, 2).unwrap()),
    ] {
        let w = c.physical().len();
        let t = std::time::Instant::now();
        let rep = oracle_verify(&c, &zs(w), OracleMode::Exhaustive).unwrap();
        println!(
            "{name}: ok={} branches={} consistent={} dev={:.2e} minc={:.2e} ({:?})",
            rep.ok,
            rep.branches_checked,
            rep.consistent_branches,
            rep.max_deviation,
            rep.min_proportionality,
            t.elapsed()
        );
        if let Some(f) = rep.failure {
            println!("   FAILURE: {f}");
        }
    }
}
