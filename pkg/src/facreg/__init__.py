"""facreg - 3D Facade Layout Regularization with Binary Integer Programming"""

__version__ = "0.1.0"
