//! Concrete targets: images, Ising lattices, binary-weight logistic
//! regression, dense tables, and an exact enumeration oracle.

mod exact;
mod image;
mod ising;
mod logreg;
mod table;

pub use exact::{enumerate_exact, ExactMoments, ENUMERATION_LIMIT};
pub use image::{encode_pgm, load_pgm, parse_pgm, Floor, ImageTarget, Pgm};
pub use ising::{spin, spin_index, IsingTarget};
pub use logreg::{load_csv_dataset, Binarization, LogRegTarget};
pub use table::TableTarget;
