from .losses import (
    LossBundle,
    depth_loss,
    margin_loss,
    object_loss,
    reverse_huber,
    seg_loss,
    sobel,
    total_loss,
)
