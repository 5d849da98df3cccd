"""Language coverage analysis of Linked Open Data knowledge graphs.

Counts distinct language-tagged entities in N-Triples dumps, joins them
with Wikipedia article counts per language, clusters languages on the
two measures, and assigns quartile-based Low/Medium/High/Missing
resource categories.
"""

__version__ = "0.1.0"
