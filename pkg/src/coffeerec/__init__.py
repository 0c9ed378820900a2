"""Coffee bean recommendation pipeline.

Predicts subjective cupping qualities from objective bean properties
(random forest, epsilon-SVR, MLP - all built from first principles),
embeds reviewed and predicted beans into a shared 8-dimensional
recommendation space, and answers kNN preference queries, with an
evaluation harness for cross-validated RMSE and the transductive
recommendation-accuracy protocol.
"""

__version__ = "0.1.0"

from .attributes import SUBJECTIVE_ATTRIBUTES, OBJECTIVE_ATTRIBUTES  # noqa: F401
from .dataset import CoffeeRecord, clean, load_csv, partition  # noqa: F401
from .encoding import FeatureEncoder, encode  # noqa: F401
from .models import TrainedRegressor, load_model, save_model, train_regressor  # noqa: F401
from .recommender import build_space, rec_acc, recommend  # noqa: F401
