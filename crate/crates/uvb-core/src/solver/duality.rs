use crate::constraints::{build_ansatz, build_system, ConstraintError, SplittingType};

/// Reversed ranks with twists `u_1 - u_(k+1-i)`, normalized.
pub fn dualize_type(st: &SplittingType) -> SplittingType {
    let u = st.twists();
    let k = st.k();
    let ranks: Vec<u32> = st.ranks().iter().rev().copied().collect();
    let twists: Vec<i64> = (0..k).map(|i| u[0] - u[k - 1 - i]).collect();
    SplittingType::new(ranks, twists).expect("dual of a valid type is valid").normalized()
}

/// Image of a solution under `S_i -> (-1)^(r_i) S_(k+1-i)(-T)`: factors reversed, degree-`d`
/// coefficients multiplied by `(-1)^d`.
pub fn transform_solution(st: &SplittingType, tuple: &[i64], n: u32) -> Result<Vec<i64>, ConstraintError> {
    let st = st.normalized();
    let sys = build_system(&st, n)?;
    if !sys.check_solution(tuple)? {
        return Err(ConstraintError::InvalidSolution);
    }
    let dual = dualize_type(&st);
    let (_, dual_unknowns) = build_ansatz(&dual, n);
    let k = st.k();
    dual_unknowns
        .iter()
        .map(|du| {
            let src = sys
                .unknowns
                .iter()
                .position(|u| u.factor == k - 1 - du.factor && u.degree == du.degree && u.basis_index == du.basis_index)
                .expect("dual ansatz mirrors the original");
            let sign = if du.degree % 2 == 1 { -1 } else { 1 };
            Ok(sign * tuple[src])
        })
        .collect()
}
