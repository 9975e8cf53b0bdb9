fn main() {
    let rg = moil::envs::build_resource_gathering(0.96, 1.0).unwrap();
    match moil::pareto::ols_front(&rg.momdp, 1e-9) {
        Ok(f) => println!("front ok, {} vertices", f.vertices.len()),
        Err(e) => println!("error: {e}"),
    }
}
