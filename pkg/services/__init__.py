"""Services for Hypercheck."""
