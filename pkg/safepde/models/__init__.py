"""Data models for safepde."""
