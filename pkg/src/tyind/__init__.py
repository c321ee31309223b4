"""Exact forms on finite abelian groups, Gauss sums, and Tambara-Yamagami indicators."""
