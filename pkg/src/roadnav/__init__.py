"""Obstacle avoidance downstream of road/obstacle semantic segmentation.

Binary road images are smoothed morphologically, a local destination is picked
from road breadth, and an artificial potential field plans the path there.
Also included: flow-based feature propagation, motion-blur augmentation
kernels and the evaluation metrics (mIoU, ODR, NOFP, Hausdorff).
"""

__version__ = "0.1.0"
