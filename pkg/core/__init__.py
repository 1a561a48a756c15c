# import core.math
# import core.tensor
