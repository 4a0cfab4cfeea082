//! Seeded test corpora: random words mixing GUE and semicircular letters
//! with random rational matrix letters, and exhaustive families of traced
//! systems.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::genus::TracedWordSystem;
use crate::ncpoly::{BasisSymbol, NCPoly};
use crate::scalars::{rat, CplxRational, MatProduct, QMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A 2×2 matrix with entries `p/q`, `|p| ≤ 3`, `1 ≤ q ≤ 3`.
pub fn random_rational_matrix<R: Rng + ?Sized>(rng: &mut R) -> QMatrix {
    let entries = (0..4).map(|_| CplxRational::real(rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)))).collect();
    QMatrix::new(2, entries).expect("four entries")
}

/// Alphabet for random words: two GUE symbols and two semicircular ones.
pub fn default_alphabet() -> Vec<BasisSymbol> {
    vec![BasisSymbol::gue(0), BasisSymbol::gue(1), BasisSymbol::w(0), BasisSymbol::w(1)]
}

/// A monomial of exactly `degree` letters from `alphabet`; each matrix
/// slot holds a random 2×2 rational matrix with probability `p_matrix`.
pub fn random_monomial<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    alphabet: &[BasisSymbol],
    p_matrix: f64,
) -> NCPoly {
    let slot = |rng: &mut R| {
        if rng.gen_bool(p_matrix) {
            NCPoly::matrix(MatProduct::concrete(random_rational_matrix(rng)))
        } else {
            NCPoly::one()
        }
    };
    let mut f = slot(rng);
    for _ in 0..degree {
        let s = alphabet.choose(rng).expect("nonempty alphabet").clone();
        f = f.mul(&NCPoly::symbol(s)).mul(&slot(rng));
    }
    f
}

/// Like [`random_monomial`], but every letter occurs an even number of
/// times, so the expected trace is rarely zero.
pub fn random_paired_monomial<R: Rng + ?Sized>(rng: &mut R, degree: usize, alphabet: &[BasisSymbol], p_matrix: f64) -> NCPoly {
    let mut letters: Vec<BasisSymbol> = (0..degree / 2)
        .flat_map(|_| {
            let s = alphabet.choose(rng).expect("nonempty alphabet").clone();
            [s.clone(), s]
        })
        .collect();
    letters.shuffle(rng);
    let slot = |rng: &mut R| {
        if rng.gen_bool(p_matrix) {
            NCPoly::matrix(MatProduct::concrete(random_rational_matrix(rng)))
        } else {
            NCPoly::one()
        }
    };
    let mut f = slot(rng);
    for s in letters {
        f = f.mul(&NCPoly::symbol(s)).mul(&slot(rng));
    }
    f
}

/// `count` random monomials with even degree in `2..=max_degree` and even
/// letter multiplicities.
pub fn random_corpus(seed: u64, count: usize, max_degree: usize) -> Vec<NCPoly> {
    let mut r = rng(seed);
    let alphabet = default_alphabet();
    (0..count)
        .map(|_| {
            let d = 2 * r.gen_range(1..=(max_degree / 2).max(1));
            random_paired_monomial(&mut r, d, &alphabet, 0.5)
        })
        .collect()
}

/// All compositions of `n` (ordered cycle lengths).
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The symbol of identity `id` with the given flavor choice.
fn symbol(id: u32, semi: bool) -> BasisSymbol {
    if semi {
        BasisSymbol::w(id)
    } else {
        BasisSymbol::gue(id)
    }
}

/// Every system with `n` letters arranged in consecutive cycles given by a
/// composition, every assignment of two identities to the letters, and
/// every flavor choice per identity; matrix letters are random 2×2
/// rationals.
pub fn exhaustive_systems<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<TracedWordSystem>> {
    let mut out = Vec::new();
    for comp in compositions(n) {
        for ids in 0..1u32 << n {
            for flavors in 0..4u32 {
                let letters: Vec<BasisSymbol> =
                    (0..n).map(|k| ids >> k & 1).map(|id| symbol(id, flavors >> id & 1 == 1)).collect();
                out.push(system_from(&comp, letters, rng)?);
            }
        }
    }
    Ok(out)
}

fn system_from<R: Rng + ?Sized>(comp: &[usize], letters: Vec<BasisSymbol>, rng: &mut R) -> Result<TracedWordSystem> {
    let mut it = letters.into_iter();
    let factors: Vec<Vec<(BasisSymbol, MatProduct)>> = comp
        .iter()
        .map(|&len| {
            (0..len)
                .map(|_| (it.next().expect("enough letters"), MatProduct::concrete(random_rational_matrix(rng))))
                .collect()
        })
        .collect();
    TracedWordSystem::from_traces(&factors)
}

/// A random system with `n` letters: random composition, two identities,
/// random flavors.
pub fn random_system<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TracedWordSystem> {
    let mut comp = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        comp.push(k);
        left -= k;
    }
    let semi = [rng.gen_bool(0.5), rng.gen_bool(0.5)];
    let letters = (0..n)
        .map(|_| {
            let id = rng.gen_range(0..2u32);
            symbol(id, semi[id as usize])
        })
        .collect();
    system_from(&comp, letters, rng)
}
