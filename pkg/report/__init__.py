"""
Report - Configuration, Output and Subcommands
----------------------------------------------
- config: config files and Hydra presets -> RunConfig
- writers: CSV tables, SVG plots, manifest.yaml
- subcommands: one handler per CLI subcommand
- reproduce: the full figure bundle
"""
