//! Exact rational-function arithmetic: parsing, normal forms, derivatives and Taylor jets.

use integrability::ratexpr::{format_rational, parse_rational_function, ratio, int, vars, Taylor2};

fn main() {
    let v = vars(&["x", "y"]);
    let f = parse_rational_function("(x^2 - y^2)/(x^2 - 1) + 1/(x+1)", &v).unwrap();
    let g = parse_rational_function("(x - 1)/(x + y)", &v).unwrap();
    println!("f          = {}", f);
    println!("f * g      = {}", &f * &g);
    println!("f - f      = {}", &f - &f);
    println!("df/dx      = {}", f.derivative(0));
    println!("d2f/dxdy   = {}", f.derivative(0).derivative(1));

    // `1/2` is an exact literal, never a float.
    let half = parse_rational_function("1/2*x", &v).unwrap();
    println!("1/2*x at x = 3: {}", format_rational(&half.evaluate(&[int(3), int(0)]).unwrap()));

    let point = [ratio(1, 2), int(2)];
    let t = Taylor2::of_rational_function(&f, &point, 3).unwrap();
    println!("jets of f at (1/2, 2):");
    for a in 0..=3 {
        for b in 0..=3 - a {
            println!("  d^{}x d^{}y f = {}", a, b, format_rational(&t.derivative_value(a, b)));
        }
    }
    match parse_rational_function("1/(x - x)", &v) {
        Ok(h) => println!("unexpected: {}", h),
        Err(e) => println!("rejected: {}", e),
    }
}
