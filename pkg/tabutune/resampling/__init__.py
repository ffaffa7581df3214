from tabutune.resampling.smote import ResampleError, SmoteConfig, smote

__all__ = ["ResampleError", "SmoteConfig", "smote"]
