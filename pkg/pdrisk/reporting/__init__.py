"""Report writers: CSV/JSON tables and console rendering."""
