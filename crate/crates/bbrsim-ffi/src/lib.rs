//! C ABI surface for bbrsim. Placeholder during scaffolding.
