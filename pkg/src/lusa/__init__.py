"""Land-use suitability criteria extraction and raster multi-criteria evaluation.

Pipeline: ingest regulation text, annotate it with a linguistic cascade,
gazetteer lookup, and pattern-matching rules; populate a criteria
ontology from the resulting Mention annotations; and feed the extracted
setback constraints into a weighted-linear-combination raster model
that produces suitability maps.
"""

__version__ = "0.1.0"
