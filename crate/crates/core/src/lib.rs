//! Verification and construction toolkit for PDE systems describing
//! pseudospherical and spherical surfaces.

pub mod kernel;
pub mod jetcalc;
pub mod report;
pub mod forms;
pub mod laxzoo;
pub mod classify;
pub mod chsym;
pub mod numgrid;
pub mod cli;
