//! Reduced words over a symmetric alphabet, depth-first enumeration,
//! evaluation into matrix sets, and free-group automorphisms.

use crate::error::{Error, Result};
use crate::matrix::{ScaledMatrix, UnimodularMatrix};
use crate::symmetric::SymmetricSet;

/// A letter of the symmetric alphabet of rank r: index `2k` is the k-th
/// positive generator, `2k + 1` its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub usize);

impl Letter {
    pub fn generator(self) -> usize {
        self.0 >> 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Positive generator `k`.
    pub fn positive(k: usize) -> Letter {
        Letter(2 * k)
    }

    /// Inverse of generator `k`.
    pub fn negative(k: usize) -> Letter {
        Letter(2 * k + 1)
    }
}

/// A freely reduced word: no adjacent inverse pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Free reduction of an arbitrary letter sequence; idempotent.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Self { letters: stack }
    }

    /// Wraps a sequence checked to be already reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Self> {
        for w in letters.windows(2) {
            if w[1] == w[0].inverse() {
                return Err(Error::Numerical("letter sequence is not reduced".into()));
            }
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Validates that every letter indexes a generator below `rank`.
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        for l in &self.letters {
            if l.generator() >= rank {
                return Err(Error::BadLetter {
                    index: l.index(),
                    rank,
                });
            }
        }
        Ok(())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        ReducedWord::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Extends to `target_len` letters by repeating the final letter
    /// (always an admissible continuation). Empty words stay empty.
    pub fn padded(&self, target_len: usize) -> ReducedWord {
        let mut letters = self.letters.clone();
        if let Some(&last) = letters.last() {
            while letters.len() < target_len {
                letters.push(last);
            }
        }
        ReducedWord { letters }
    }

    /// First index at which two words differ, if any.
    pub fn first_difference(&self, other: &ReducedWord) -> Option<usize> {
        let n = self.len().min(other.len());
        (0..n)
            .find(|&i| self.letters[i] != other.letters[i])
            .or_else(|| (self.len() != other.len()).then_some(n))
    }

    /// Render with the element names of a symmetric set.
    pub fn display(&self, set: &SymmetricSet) -> String {
        self.letters
            .iter()
            .map(|l| set.name(l.index()).to_string())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Streaming depth-first enumeration of all reduced words of length
/// `1..=max_len` over rank `r`, in preorder. Emits exactly
/// `2r (2r-1)^(n-1)` words of each length `n`.
pub struct ReducedWordIter {
    rank: usize,
    max_len: usize,
    // stack of letters forming the current word; `next_child` tracks the
    // alphabet index to try at each level
    word: Vec<Letter>,
    next_child: Vec<usize>,
}

impl ReducedWordIter {
    pub fn new(rank: usize, max_len: usize) -> Self {
        Self {
            rank,
            max_len,
            word: Vec::new(),
            next_child: vec![0],
        }
    }
}

impl Iterator for ReducedWordIter {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        loop {
            let depth = self.word.len();
            if depth < self.max_len {
                let start = *self.next_child.last().unwrap();
                let mut child = start;
                while child < 2 * self.rank {
                    let letter = Letter(child);
                    let blocked = self.word.last() == Some(&letter.inverse());
                    if !blocked {
                        *self.next_child.last_mut().unwrap() = child + 1;
                        self.word.push(letter);
                        self.next_child.push(0);
                        return Some(ReducedWord {
                            letters: self.word.clone(),
                        });
                    }
                    child += 1;
                }
            }
            // exhausted this level; backtrack
            self.word.pop()?;
            self.next_child.pop();
        }
    }
}

/// Depth-first scan over reduced words of length `1..=max_len` carrying a
/// per-prefix state, so word-indexed data (e.g. matrix products) is built
/// incrementally. `extend` produces the child state from its parent and
/// the appended letter; `visit` sees every word once.
pub fn scan_reduced_words<S, E, V>(rank: usize, max_len: usize, root: S, mut extend: E, mut visit: V)
where
    E: FnMut(&S, Letter) -> S,
    V: FnMut(&[Letter], &S),
{
    let mut word: Vec<Letter> = Vec::new();
    let mut states: Vec<S> = vec![root];
    let mut next_child: Vec<usize> = vec![0];
    loop {
        let depth = word.len();
        let mut descended = false;
        if depth < max_len {
            let start = *next_child.last().unwrap();
            let mut child = start;
            while child < 2 * rank {
                let letter = Letter(child);
                if word.last() != Some(&letter.inverse()) {
                    *next_child.last_mut().unwrap() = child + 1;
                    let state = extend(states.last().unwrap(), letter);
                    word.push(letter);
                    visit(&word, &state);
                    states.push(state);
                    next_child.push(0);
                    descended = true;
                    break;
                }
                child += 1;
            }
        }
        if !descended {
            if word.pop().is_none() {
                return;
            }
            states.pop();
            next_child.pop();
        }
    }
}

/// Ordered matrix product of the word's letters in a symmetric set.
pub fn evaluate(w: &ReducedWord, set: &SymmetricSet) -> Result<UnimodularMatrix> {
    w.check_rank(set.rank())?;
    let mut acc = UnimodularMatrix::identity(set.dim());
    for l in w.letters() {
        acc = acc.mul(set.element(l.index()))?;
    }
    Ok(acc)
}

/// Log-rescaled product, safe for long words with large norm growth.
pub fn evaluate_scaled(w: &ReducedWord, set: &SymmetricSet) -> Result<ScaledMatrix> {
    w.check_rank(set.rank())?;
    let mut acc = ScaledMatrix::identity(set.dim());
    for l in w.letters() {
        acc = acc.mul(&ScaledMatrix::from(set.element(l.index())));
    }
    Ok(acc)
}

/// An endomorphism of the free group given by the images of the positive
/// generators. The constructors only produce invertible ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<ReducedWord>,
}

impl FreeAutomorphism {
    pub fn identity(rank: usize) -> Self {
        Self {
            rank,
            images: (0..rank)
                .map(|k| ReducedWord::reduce([Letter::positive(k)]))
                .collect(),
        }
    }

    /// The twist fixing every generator except `a_i`, which maps to
    /// `a_0^k a_i a_0^-k`. Generator 0 is the twisting generator and
    /// cannot itself be twisted.
    pub fn twist(rank: usize, twisted: usize, power: i64) -> Result<Self> {
        if twisted == 0 {
            return Err(Error::TwistOfTwister);
        }
        if twisted >= rank {
            return Err(Error::BadGenerator {
                index: twisted,
                rank,
            });
        }
        let mut out = Self::identity(rank);
        let z = if power >= 0 {
            Letter::positive(0)
        } else {
            Letter::negative(0)
        };
        let k = power.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(2 * k + 1);
        letters.extend(std::iter::repeat_n(z, k));
        letters.push(Letter::positive(twisted));
        letters.extend(std::iter::repeat_n(z.inverse(), k));
        out.images[twisted] = ReducedWord::reduce(letters);
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn image(&self, generator: usize) -> &ReducedWord {
        &self.images[generator]
    }

    /// Substitutes generator images and reduces.
    pub fn apply(&self, w: &ReducedWord) -> Result<ReducedWord> {
        w.check_rank(self.rank)?;
        let mut letters = Vec::new();
        for l in w.letters() {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                letters.extend(img.inverse().letters().iter().copied());
            } else {
                letters.extend(img.letters().iter().copied());
            }
        }
        Ok(ReducedWord::reduce(letters))
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeAutomorphism {
            rank: self.rank,
            images,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[usize]) -> ReducedWord {
        ReducedWord::reduce(letters.iter().map(|&i| Letter(i)))
    }

    #[test]
    fn reduction_cancels_adjacent_inverses() {
        // a a^-1 b -> b
        assert_eq!(w(&[0, 1, 2]), w(&[2]));
        // empty stays empty
        assert_eq!(ReducedWord::reduce([]), ReducedWord::empty());
        // a b b^-1 a -> a a
        assert_eq!(w(&[0, 2, 3, 0]), w(&[0, 0]));
    }

    #[test]
    fn reduction_is_idempotent() {
        let word = w(&[0, 2, 3, 0, 1, 1]);
        assert_eq!(ReducedWord::reduce(word.letters().iter().copied()), word);
    }

    #[test]
    fn enumeration_counts() {
        // r = 2, L = 1: 4 words; L = 2: 16 total
        assert_eq!(ReducedWordIter::new(2, 1).count(), 4);
        assert_eq!(ReducedWordIter::new(2, 2).count(), 16);
        // r = 1, L = 3: a, a^-1, aa, a^-1 a^-1, aaa, a^-1a^-1a^-1
        let words: Vec<ReducedWord> = ReducedWordIter::new(1, 3).collect();
        assert_eq!(words.len(), 6);
    }

    #[test]
    fn enumeration_matches_formula() {
        for rank in 1..=3usize {
            for max_len in 1..=6usize {
                let mut by_len = vec![0usize; max_len + 1];
                for word in ReducedWordIter::new(rank, max_len) {
                    by_len[word.len()] += 1;
                }
                for n in 1..=max_len {
                    let expect = 2 * rank * (2 * rank - 1).pow(n as u32 - 1);
                    assert_eq!(by_len[n], expect, "rank {rank} length {n}");
                }
            }
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let words: Vec<ReducedWord> = ReducedWordIter::new(2, 4).collect();
        let set: std::collections::HashSet<_> = words.iter().cloned().collect();
        assert_eq!(words.len(), set.len());
    }

    #[test]
    fn scan_agrees_with_iterator() {
        let mut scanned = Vec::new();
        scan_reduced_words(2, 3, (), |_, _| (), |word, _| scanned.push(word.to_vec()));
        let listed: Vec<Vec<Letter>> = ReducedWordIter::new(2, 3)
            .map(|w| w.letters().to_vec())
            .collect();
        assert_eq!(scanned, listed);
    }

    #[test]
    fn twist_images() {
        let phi = FreeAutomorphism::twist(3, 1, 1).unwrap();
        // a1 -> a0 a1 a0^-1
        assert_eq!(phi.image(1), &w(&[0, 2, 1]));
        // a2 fixed
        assert_eq!(phi.image(2), &w(&[4]));
        // composing with itself: a1 -> a0^2 a1 a0^-2
        let phi2 = phi.compose(&phi).unwrap();
        assert_eq!(phi2.image(1), &w(&[0, 0, 2, 1, 1]));
    }

    #[test]
    fn twist_of_twister_rejected() {
        assert!(matches!(
            FreeAutomorphism::twist(3, 0, 1),
            Err(Error::TwistOfTwister)
        ));
    }

    #[test]
    fn apply_twist_examples() {
        let id = FreeAutomorphism::identity(3);
        let word = w(&[2, 4]);
        assert_eq!(id.apply(&word).unwrap(), word);

        let phi = FreeAutomorphism::twist(3, 1, 1).unwrap();
        // a1 a2 -> a0 a1 a0^-1 a2
        assert_eq!(phi.apply(&w(&[2, 4])).unwrap(), w(&[0, 2, 1, 4]));
        // a0 fixed
        assert_eq!(phi.apply(&w(&[0])).unwrap(), w(&[0]));
    }

    #[test]
    fn twist_with_negative_power() {
        let phi = FreeAutomorphism::twist(2, 1, -2).unwrap();
        assert_eq!(phi.image(1), &w(&[1, 1, 2, 0, 0]));
        let back = FreeAutomorphism::twist(2, 1, 2).unwrap();
        let round = phi.compose(&back).unwrap();
        assert_eq!(round, FreeAutomorphism::identity(2));
    }

    #[test]
    fn padding_repeats_last_letter() {
        let word = w(&[0, 2]);
        assert_eq!(word.padded(4), w(&[0, 2, 2, 2]));
        assert_eq!(ReducedWord::empty().padded(3), ReducedWord::empty());
    }

    #[test]
    fn first_difference_index() {
        assert_eq!(w(&[0, 2, 0]).first_difference(&w(&[0, 3])), Some(1));
        assert_eq!(w(&[0, 2]).first_difference(&w(&[0, 2])), None);
        assert_eq!(w(&[0, 2]).first_difference(&w(&[0, 2, 0])), Some(2));
    }
}
