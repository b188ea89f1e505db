use super::{ProjectiveRep, STATE_EQUALITY_TOL};
use crate::error::{Error, Result};
use crate::quantum::{trace_distance, CqChannel, DensityMatrix};
use crate::scalar::{lit, Real};

/// Channel `g ↦ U_g ρ U_g†` together with the data that generated it.
#[derive(Clone, Debug)]
pub struct SymmetricChannel<T: Real> {
    pub rep: ProjectiveRep<T>,
    pub rho: DensityMatrix<T>,
    pub channel: CqChannel<T>,
}

pub fn make_symmetric_channel<T: Real>(
    rep: &ProjectiveRep<T>,
    rho: &DensityMatrix<T>,
) -> Result<SymmetricChannel<T>> {
    Error::check_dim(rep.dim(), rho.dim())?;
    let states = (0..rep.group().order())
        .map(|g| rho.conjugate_by(rep.unitary(g)))
        .collect::<Result<Vec<_>>>()?;
    let channel = CqChannel::new(rep.group().names().to_vec(), states)?;
    Ok(SymmetricChannel {
        rep: rep.clone(),
        rho: rho.clone(),
        channel,
    })
}

/// `K = {g : W_g = W_e}`, deciding equality by trace distance.
pub fn stabilizer<T: Real>(sc: &SymmetricChannel<T>) -> Result<Vec<usize>> {
    let group = sc.rep.group();
    let we = sc.channel.state(group.identity());
    let tol = lit::<T>(STATE_EQUALITY_TOL);
    let mut k = Vec::new();
    for g in 0..group.order() {
        if trace_distance(sc.channel.state(g), we)? <= tol {
            k.push(g);
        }
    }
    if !group.is_subgroup(&k) {
        return Err(Error::Inconsistent(
            "elements fixing the output state do not form a subgroup".into(),
        ));
    }
    Ok(k)
}

/// Channel on the cosets `G/K`.
#[derive(Clone, Debug)]
pub struct InducedChannel<T: Real> {
    pub channel: CqChannel<T>,
    /// Cosets in the order of the induced alphabet; the first entry of each
    /// is its representative.
    pub cosets: Vec<Vec<usize>>,
}

pub fn induce<T: Real>(sc: &SymmetricChannel<T>, k: &[usize]) -> Result<InducedChannel<T>> {
    let group = sc.rep.group();
    if !group.is_subgroup(k) {
        return Err(Error::validation("K is not a subgroup"));
    }
    let cosets = group.cosets(k);
    let tol = lit::<T>(STATE_EQUALITY_TOL);
    let mut labels = Vec::with_capacity(cosets.len());
    let mut states = Vec::with_capacity(cosets.len());
    for c in &cosets {
        let rep_state = sc.channel.state(c[0]);
        for &g in &c[1..] {
            if trace_distance(sc.channel.state(g), rep_state)? > tol {
                return Err(Error::Inconsistent(format!(
                    "outputs of {} and {} differ within one coset",
                    group.name(c[0]),
                    group.name(g)
                )));
            }
        }
        labels.push(format!("[{}]", group.name(c[0])));
        states.push(rep_state.clone());
    }
    Ok(InducedChannel {
        channel: CqChannel::new(labels, states)?,
        cosets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random, DensityMatrix};
    use crate::scalar::C;
    use crate::symmetric::check_nr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn amplitudes(v: &[f64]) -> Vec<C<f64>> {
        v.iter().map(|&x| C::new(x, 0.0)).collect()
    }

    #[test]
    fn example_one_trivial_stabilizer() {
        let rep = ProjectiveRep::<f64>::clock(4, 1).unwrap();
        let rho = DensityMatrix::pure(&amplitudes(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        let sc = make_symmetric_channel(&rep, &rho).unwrap();
        assert_eq!(stabilizer(&sc).unwrap(), vec![0]);
        let ind = induce(&sc, &[0]).unwrap();
        assert_eq!(ind.channel.len(), 4);
        assert_eq!(ind.channel.states(), sc.channel.states());
        for a in 0..4 {
            for b in 0..a {
                let t = trace_distance(sc.channel.state(a), sc.channel.state(b)).unwrap();
                assert!(t > 0.1);
            }
        }
    }

    #[test]
    fn example_two_stabilizer() {
        // d = p q with p = 3, q = 2: support on multiples of q.
        let (p, q) = (3, 2);
        let mut amp = vec![0.0; p * q];
        amp[0] = 0.6f64.sqrt();
        amp[2] = 0.3f64.sqrt();
        amp[4] = 0.1f64.sqrt();
        let rep = ProjectiveRep::<f64>::clock(p * q, 1).unwrap();
        let rho = DensityMatrix::pure(&amplitudes(&amp)).unwrap();
        let sc = make_symmetric_channel(&rep, &rho).unwrap();
        let k = stabilizer(&sc).unwrap();
        assert_eq!(k, vec![0, 3]);
        let ind = induce(&sc, &k).unwrap();
        assert_eq!(ind.channel.len(), p);
        assert_eq!(ind.channel.len() * k.len(), p * q);
        assert!(check_nr(&ind.channel).holds);
    }

    #[test]
    fn invariant_state_full_stabilizer() {
        let rep = ProjectiveRep::<f64>::clock(3, 1).unwrap();
        let sc = make_symmetric_channel(&rep, &DensityMatrix::maximally_mixed(3)).unwrap();
        assert_eq!(stabilizer(&sc).unwrap(), vec![0, 1, 2]);
        let diag = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let sc = make_symmetric_channel(&rep, &diag).unwrap();
        for g in 0..3 {
            assert!(trace_distance(sc.channel.state(g), &diag).unwrap() < 1e-12);
        }
    }

    #[test]
    fn weyl_heisenberg_induced_nr() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rep = ProjectiveRep::<f64>::weyl_heisenberg(2, 2).unwrap();
        let rho = random::density::<f64>(&mut rng, 4);
        let sc = make_symmetric_channel(&rep, &rho).unwrap();
        let k = stabilizer(&sc).unwrap();
        let ind = induce(&sc, &k).unwrap();
        assert!(check_nr(&ind.channel).holds);
        assert!(make_symmetric_channel(&rep, &random::density::<f64>(&mut rng, 3)).is_err());
    }
}
