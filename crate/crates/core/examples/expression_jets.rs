//! Parsing coefficient expressions and evaluating them with three exact
//! derivatives.

use geoweb::expr::Expression;

fn main() {
    for (text, x) in
        [("sinh(u)", 1.0), ("u^2 + 3*u", 3.0), ("sqrt(1 + u^2) * exp(-u/2)", 0.5), ("log(u)", -1.0), ("sin(u", 0.0)]
    {
        match Expression::parse(text, "u") {
            Ok(e) => match e.eval_jet3(x) {
                Ok(j) => println!("{e} at {x}: value {:.9}, d1 {:.9}, d2 {:.9}, d3 {:.9}", j.value, j.d1, j.d2, j.d3),
                Err(err) => println!("{e} at {x}: {err}"),
            },
            Err(err) => println!("{text:?}: {err}"),
        }
    }
}
