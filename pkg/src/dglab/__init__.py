"""Exact computations with finite-dimensional differential graded Lie
algebras over the rationals: cohomology, morphisms, homotopy fibres,
Cartan homotopies, Batalin-Vilkovisky algebras and Maurer-Cartan
deformation problems."""

__version__ = "0.1.0"
