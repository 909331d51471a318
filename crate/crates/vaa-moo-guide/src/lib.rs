//! Placeholder while the book chapters are written.
