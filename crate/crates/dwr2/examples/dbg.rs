use dwr2::compile::*;
use dwr2::tableau::verify_dwr_traced;

fn main() {
    let c = compile_constant_space(5).unwrap();
    println!("{}", c.serialize());
    let rep = verify_dwr_traced(&c, &"ZZZZZ".parse().unwrap()).unwrap();
    println!("ok={} diag={:?}", rep.ok, rep.diagnosis);
    for (t, rows) in rep.trace.unwrap().iter().enumerate() {
        println!("after layer {t}:");
        for r in rows { println!("  {r}"); }
    }
}
