//! Permutations of `{0..n-1}` stored in image form.

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}`; `images[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from its image array, verifying bijectivity.
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            let i = img as usize;
            if i >= n || seen[i] {
                return Err(Error::invalid("image array is not a permutation"));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `self` followed by `next`: the result maps `x` to `next(self(x))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.len(), next.len(), "carrier size mismatch");
        Permutation {
            images: self.images.iter().map(|&v| next.images[v as usize]).collect(),
        }
    }

    /// Completes a partial injection to a permutation: positions where
    /// `partial[i]` is `None` are matched to the unused targets, both taken
    /// in ascending index order.
    pub fn complete_partial(partial: &[Option<u32>]) -> Result<Self> {
        let n = partial.len();
        let mut used = vec![false; n];
        for p in partial.iter().flatten() {
            let i = *p as usize;
            if i >= n || used[i] {
                return Err(Error::invalid("partial map is not injective"));
            }
            used[i] = true;
        }
        let mut free_targets = (0..n as u32).filter(|&t| !used[t as usize]);
        let mut images = Vec::with_capacity(n);
        for p in partial {
            match p {
                Some(v) => images.push(*v),
                None => images.push(free_targets.next().expect("count mismatch")),
            }
        }
        Ok(Permutation { images })
    }
}
