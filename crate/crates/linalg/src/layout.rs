use crate::LinalgError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Marks a factor `A` of dimension `J*r` as `A_c (J) x A_r (r)`, with the
/// classical index most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalSplit {
    pub label: String,
    pub j: usize,
    pub r: usize,
}

/// Ordered tensor factors. Index order is row-major: the first factor is the
/// most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    factors: Vec<Factor>,
    classical_split: Option<ClassicalSplit>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(factors: Vec<(S, usize)>) -> Result<Self, LinalgError> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(l, d)| Factor {
                label: l.into(),
                dim: d,
            })
            .collect();
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(LinalgError::ZeroDim(f.label.clone()));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(LinalgError::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self {
            factors,
            classical_split: None,
        })
    }

    /// One factor.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new(vec![(label, dim)]).expect("valid single-factor layout")
    }

    /// Attach a classical split `label = label_c (j) x label_r (r)`.
    pub fn with_split(mut self, label: &str, j: usize, r: usize) -> Result<Self, LinalgError> {
        let d = self.dim_of(label)?;
        if d != j * r || j == 0 || r == 0 {
            return Err(LinalgError::BadSplit {
                label: label.to_string(),
                expected: j * r,
                found: d,
            });
        }
        self.classical_split = Some(ClassicalSplit {
            label: label.to_string(),
            j,
            r,
        });
        Ok(self)
    }

    pub fn classical_split(&self) -> Option<&ClassicalSplit> {
        self.classical_split.as_ref()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize, LinalgError> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| LinalgError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|f| f.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize, LinalgError> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Concatenation `self x other`. The split of `self` wins if both carry one.
    pub fn concat(&self, other: &SystemLayout) -> Result<Self, LinalgError> {
        let mut f: Vec<(String, usize)> = self
            .factors
            .iter()
            .map(|x| (x.label.clone(), x.dim))
            .collect();
        f.extend(other.factors.iter().map(|x| (x.label.clone(), x.dim)));
        let mut out = Self::new(f)?;
        out.classical_split = self
            .classical_split
            .clone()
            .or_else(|| other.classical_split.clone());
        Ok(out)
    }

    /// Sub-layout with the given labels, in the order they appear in `self`.
    pub fn select(&self, keep: &[&str]) -> Result<Self, LinalgError> {
        for k in keep {
            self.position(k)?;
        }
        let f: Vec<(String, usize)> = self
            .factors
            .iter()
            .filter(|x| keep.contains(&x.label.as_str()))
            .map(|x| (x.label.clone(), x.dim))
            .collect();
        let mut out = Self::new(f)?;
        if let Some(s) = &self.classical_split {
            if keep.contains(&s.label.as_str()) {
                out.classical_split = Some(s.clone());
            }
        }
        Ok(out)
    }

    /// Layout in the given label order (must be a permutation of the labels).
    pub fn reorder(&self, order: &[&str]) -> Result<Self, LinalgError> {
        if order.len() != self.len() {
            return Err(LinalgError::DimMismatch {
                expected: self.len(),
                found: order.len(),
            });
        }
        let mut f = Vec::with_capacity(order.len());
        for l in order {
            let p = self.position(l)?;
            f.push((self.factors[p].label.clone(), self.factors[p].dim));
        }
        let mut out = Self::new(f)?;
        out.classical_split = self.classical_split.clone();
        Ok(out)
    }

    /// Replace the split factor `A` by two factors `A_c` and `A_r`. Identity
    /// if there is no split.
    pub fn expand_split(&self) -> Result<Self, LinalgError> {
        let Some(s) = &self.classical_split else {
            return Ok(self.clone());
        };
        let mut f = Vec::with_capacity(self.len() + 1);
        for x in &self.factors {
            if x.label == s.label {
                f.push((format!("{}_c", s.label), s.j));
                f.push((format!("{}_r", s.label), s.r));
            } else {
                f.push((x.label.clone(), x.dim));
            }
        }
        Self::new(f)
    }

    /// Same factors with one label renamed.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self, LinalgError> {
        let p = self.position(from)?;
        let mut f: Vec<(String, usize)> = self
            .factors
            .iter()
            .map(|x| (x.label.clone(), x.dim))
            .collect();
        f[p].0 = to.to_string();
        let mut out = Self::new(f)?;
        out.classical_split = self.classical_split.clone().map(|mut s| {
            if s.label == from {
                s.label = to.to_string();
            }
            s
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(SystemLayout::new(vec![("A", 2), ("A", 3)]).is_err());
        assert!(SystemLayout::new(vec![("A", 0)]).is_err());
    }

    #[test]
    fn split_must_match_dimension() {
        let l = SystemLayout::new(vec![("A", 6), ("R", 2)]).unwrap();
        assert!(l.clone().with_split("A", 2, 3).is_ok());
        assert!(l.with_split("A", 2, 2).is_err());
    }

    #[test]
    fn expand_split_inserts_two_factors() {
        let l = SystemLayout::new(vec![("A", 6), ("R", 2)])
            .unwrap()
            .with_split("A", 3, 2)
            .unwrap();
        let e = l.expand_split().unwrap();
        assert_eq!(e.labels(), vec!["A_c", "A_r", "R"]);
        assert_eq!(e.dims(), vec![3, 2, 2]);
    }
}
