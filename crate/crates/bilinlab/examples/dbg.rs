use bilinlab::*;
use bilinlab::witness::*;
use bilinlab::phase::Phase;

fn main() {
    let t = ExponentTriple::from_pq(1.0, 2.0).unwrap();
    for hx in [2.0, 2.2, 2.4, 2.6, 2.8, 3.0] {
        let grid = Grid::new(4096, hx).unwrap();
        let mut line = format!("h={hx}: ");
        for (lambda, k) in [(400.0, 2usize), (1600.0, 4)] {
            match certify_lower_bound(&Phase::quadratic(), lambda, k, &t, grid) {
                Ok(c) => line += &format!("l={lambda},k={k}: {:.4} (W={}) | ", c.lower_bound,
                    c.description.split("halfwidth=").nth(1).unwrap().split(',').next().unwrap()),
                Err(e) => line += &format!("l={lambda},k={k}: ERR {e} | "),
            }
        }
        println!("{line}");
    }
    println!("suggested: {}", suggested_spacing_quadratic(1600.0, 4));
}
