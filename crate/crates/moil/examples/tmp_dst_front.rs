fn main() {
    let dst = moil::envs::build_deep_sea(0.999, 1.0).unwrap();
    match moil::pareto::ols_front(&dst.momdp, 1e-9) {
        Ok(f) => {
            println!("front ok, {} vertices", f.vertices.len());
            for v in &f.vertices { println!("  {:?}", v.values); }
        }
        Err(e) => println!("error: {e}"),
    }
}
