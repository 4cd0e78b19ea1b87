//! Built-in cell data: the truncated/completed polynomial algebra, the
//! Temperley-Lieb diagram algebras, and the type-A tableau tower with its
//! column-removal label maps.

pub mod poly;
pub mod ssyt;
pub mod tl;
pub mod tower;

pub use poly::poly_datum;
pub use ssyt::{enumerate_ssyt, Partition, Tableau};
pub use tl::{tl_datum, TLDiagram};
pub use tower::{column_removal, tableau_tower, ColumnRemoval, TableauTower};
