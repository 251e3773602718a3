"""Financial headline sentiment regression."""
