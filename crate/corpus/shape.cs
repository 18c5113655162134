using System;

namespace Shapes
{
    public abstract class Shape
    {
        protected string name;

        public string Name
        {
            get { return name; }
            set { name = value; }
        }

        public abstract double Area();

        public virtual string Describe()
        {
            return string.Format("{0}: {1}", name, Area());
        }
    }

    public class Circle : Shape
    {
        private double radius;

        public Circle(double r)
        {
            radius = r;
            Name = "circle";
        }

        public override double Area()
        {
            return 3.14159 * radius * radius;
        }

        public override string Describe()
        {
            return "round " + base.Describe();
        }
    }
}
