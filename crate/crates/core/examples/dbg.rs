use rdsym_core::expr::atom::Jet;
use rdsym_core::expr::calculus::*;
use rdsym_core::expr::subst::*;
use rdsym_core::expr::*;
use rdsym_core::pde::*;

fn main() {
    let s = RdSystem::new(
        1,
        DiffusionMatrix::param(),
        [parse("u*F1(u/v)").unwrap(), parse("v*F1(u/v)").unwrap()],
    )
    .unwrap();
    let rhs = s.rhs();
    // component 2: qhat = -R^2
    let q2 = -rhs[1].clone();
    // dt on manifold by hand
    let dt = total_derivative_capped(&q2, TotalDir::T, 4).unwrap();
    let rules = s.solution_manifold_rules(2).unwrap();
    println!("rules:");
    for (j, e) in &rules {
        println!("  {} -> {}", Expr::jet(*j), e);
    }
    let mut b = Bindings::new();
    for (jet, e) in rules {
        b = b.jet(jet, e);
    }
    let dtm = substitute_capped(&dt, &b).unwrap();
    let lap = laplacian_capped(&q2, 1, 4).unwrap();
    let fj = s.f_jacobian();
    println!("fj[1][0] = {}", fj[1][0]);
    println!("fj[1][1] = {}", fj[1][1]);
    let alap_1 = Expr::param("a") * lap.clone() + laplacian_capped(&(-rhs[0].clone()), 1, 4).unwrap() * Expr::one();
    let _ = alap_1;
    let e2 = dtm.clone()
        - (laplacian_capped(&(-rhs[0].clone()), 1, 4).unwrap()
            + Expr::param("a") * lap.clone())
        - (fj[1][0].clone() * (-rhs[0].clone()) + fj[1][1].clone() * (-rhs[1].clone()));
    println!("E2 = {}", e2);
}
