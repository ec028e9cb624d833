"""
Export renderers for mealy.

Each format lives in its own module here:
- dot.py         Graphviz DOT for automata, helix graphs and orbital graphs
- ascii_grid.py  plain-text tiling witnesses
- json_report.py canonical JSON bytes for every report
"""
