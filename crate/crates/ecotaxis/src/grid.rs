use thiserror::Error;

/// Uniform cell-centered grid on (0, domain_len): n_cells cells of width dx,
/// centers at (i + 1/2)*dx. Fields are plain `Vec<f64>` of length n_cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n_cells: usize,
    pub domain_len: f64,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("n_cells = {0} is below the minimum of 4")]
    TooFewCells(usize),
    #[error("domain length must be finite and positive (got {0})")]
    BadLength(f64),
}

impl Grid1D {
    pub fn new(n_cells: usize, domain_len: f64) -> Result<Self, GridError> {
        if n_cells < 4 {
            return Err(GridError::TooFewCells(n_cells));
        }
        if !domain_len.is_finite() || domain_len <= 0.0 {
            return Err(GridError::BadLength(domain_len));
        }
        Ok(Grid1D { n_cells, domain_len, dx: domain_len / n_cells as f64 })
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| (i as f64 + 0.5) * self.dx).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let g = Grid1D::new(8, 4.0).unwrap();
        assert_eq!(g.dx, 0.5);
        let xs = g.cell_centers();
        assert_eq!(xs.len(), 8);
        assert_eq!(xs[0], 0.25);
        assert_eq!(xs[7], 3.75);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(3, 1.0).is_err());
        assert!(Grid1D::new(8, 0.0).is_err());
        assert!(Grid1D::new(8, f64::NAN).is_err());
    }
}
