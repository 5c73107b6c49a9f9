//! Cubic fields via the reduction theory of integral binary cubic forms.

pub mod enumerate;
pub mod field;
pub mod forms;

pub use enumerate::{naive_forms, reduced_maximal_forms, ENUM_LIMIT};
pub use field::{
    enumerate_cubic_fields, is_fundamental_disc, CubicTable, FieldRecord, GaloisType, LocalDatum,
    UniformityRow,
};
pub use forms::{is_maximal_at, BinaryCubicForm};
