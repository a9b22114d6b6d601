"""
From raw rater scores to analysis-ready outcomes
================================================

Multiple raters score the same images, but each uses the scale in their own
way: one saturates early, another compresses everything into a narrow band.
This demo shows the score pipeline that irons that out -- per-rater min-max
scaling, averaging into a consensus score, and an alternative median-split
binarization -- and demonstrates the invariance that makes the binarization
trustworthy.
"""

# %%
# Three raters, six images, one latent severity. Rater "soft" compresses
# scores, rater "harsh" pushes them apart; all three agree on the ordering.

import numpy as np

from nof1lab import RatingMatrix, average_ratings, binarize_ratings, scale_ratings

latent = np.array([0.15, 0.3, 0.45, 0.6, 0.75, 0.9])
matrix = RatingMatrix(
    rater_ids=("plain", "soft", "harsh"),
    image_ids=tuple(f"img{j}" for j in range(6)),
    scores=np.vstack([latent, 0.4 + 0.2 * latent, latent**3]),
)
print("raw scores by rater:")
for rater, row in zip(matrix.rater_ids, matrix.scores):
    print(f"  {rater:>5}: {np.round(row, 3)}")

# %%
# Min-max scaling maps every rater onto [0, 1] using only their own range,
# so systematic generosity or timidity cancels out.

scaled = scale_ratings(matrix)
for rater, row in zip(scaled.rater_ids, scaled.scores):
    print(f"  {rater:>5}: {np.round(row, 3)}")

# %%
# Averaging the scaled scores gives one consensus severity per image --
# the continuous outcome the regression model consumes.

consensus = average_ratings(scaled)
for image, value in consensus.items():
    print(f"  {image}: {value:.3f}")

# %%
# The binarized route thresholds each rater at their own median and takes a
# majority vote. Because medians and majorities only depend on score
# *order*, any strictly increasing re-mapping of a rater's scale leaves the
# labels untouched -- a property worth seeing once with your own eyes.

labels = binarize_ratings(matrix)
print(f"labels:              {labels.labels}")

distorted = RatingMatrix(matrix.rater_ids, matrix.image_ids, matrix.scores**5)
print(f"labels after x -> x^5: {binarize_ratings(distorted).labels}")
